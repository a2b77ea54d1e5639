/**
 * Oracle server: newline-delimited JSON over stdio (default) or TCP.
 *
 * Request:  {"id": <u64>, "pairs": [[solute, solvent, temperature_K], ...]}
 * Response: {"id": <u64>, "ln_gamma_inf": [<number|null>, ...]}
 *
 * Syntactically invalid SMILES answer null at their index. Malformed
 * requests get {"id": <id|null>, "error": "..."} and the process stays up.
 */

import * as net from "node:net";
import * as readline from "node:readline";
import { readFileSync } from "node:fs";
import { FixtureModel, GammaModel, MockGammaModel, smilesLooksValid } from "./model.js";

type Request = { id: number; pairs: [string, string, number][] };

export function handleLine(line: string, model: GammaModel): string {
  let id: unknown = null;
  try {
    const parsed = JSON.parse(line);
    id = parsed?.id ?? null;
    if (typeof parsed?.id !== "number" || !Array.isArray(parsed?.pairs)) {
      throw new Error("request must carry a numeric id and a pairs array");
    }
    const req = parsed as Request;
    const values = req.pairs.map((entry) => {
      if (!Array.isArray(entry) || entry.length !== 3) {
        throw new Error("each pair must be [solute, solvent, temperature]");
      }
      const [solute, solvent, temperature] = entry;
      if (typeof solute !== "string" || typeof solvent !== "string") {
        throw new Error("solute and solvent must be strings");
      }
      if (typeof temperature !== "number" || !(temperature > 0)) {
        throw new Error("temperature must be a positive number");
      }
      if (!smilesLooksValid(solute) || !smilesLooksValid(solvent)) {
        return null;
      }
      return model.lnGamma(solute, solvent, temperature);
    });
    return JSON.stringify({ id: req.id, ln_gamma_inf: values });
  } catch (err) {
    const message = err instanceof Error ? err.message : String(err);
    return JSON.stringify({ id: typeof id === "number" ? id : null, error: message });
  }
}

export function buildModel(fixturePath?: string): GammaModel {
  if (fixturePath) {
    const table = JSON.parse(readFileSync(fixturePath, "utf8"));
    return new FixtureModel(table);
  }
  return new MockGammaModel();
}

function serveStdio(model: GammaModel): void {
  const rl = readline.createInterface({ input: process.stdin });
  rl.on("line", (line) => {
    if (line.trim().length === 0) return;
    process.stdout.write(handleLine(line, model) + "\n");
  });
}

function serveTcp(model: GammaModel, port: number): net.Server {
  const server = net.createServer((socket) => {
    const rl = readline.createInterface({ input: socket });
    rl.on("line", (line) => {
      if (line.trim().length === 0) return;
      socket.write(handleLine(line, model) + "\n");
    });
    socket.on("error", () => socket.destroy());
  });
  server.listen(port, "127.0.0.1", () => {
    // announce readiness so callers can wait for the port
    process.stdout.write(`listening ${(server.address() as net.AddressInfo).port}\n`);
  });
  return server;
}

export function main(argv: string[]): void {
  let fixture: string | undefined;
  let tcpPort: number | undefined;
  for (let i = 0; i < argv.length; i++) {
    if (argv[i] === "--fixture") fixture = argv[++i];
    else if (argv[i] === "--tcp") tcpPort = Number(argv[++i]);
    else {
      process.stderr.write(`unknown argument: ${argv[i]}\n`);
      process.exit(2);
    }
  }
  const model = buildModel(fixture);
  if (tcpPort !== undefined) serveTcp(model, tcpPort);
  else serveStdio(model);
}

if (process.argv[1] && process.argv[1].endsWith("server.js")) {
  main(process.argv.slice(2));
}
