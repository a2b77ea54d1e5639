/**
 * Deterministic mock activity-coefficient model.
 *
 * ln(gamma_inf) is derived from a 32-bit FNV-1a hash of "solute|solvent|T",
 * mapped into [-2, 12]. Everything is integer arithmetic followed by one
 * exact power-of-two division, so the value is bit-identical across
 * processes and platforms.
 */

export const LN_GAMMA_MIN = -2;
export const LN_GAMMA_MAX = 12;

/** Canonical temperature rendering shared with fixture keys. JSON numbers
 * arrive as doubles, so 298.0 and 298 both stringify to "298"; non-Node
 * fixture writers must render integral temperatures without a decimal. */
export function temperatureKey(t: number): string {
  return String(t);
}

export function pairKey(solute: string, solvent: string, t: number): string {
  return `${solute}|${solvent}|${temperatureKey(t)}`;
}

export function fnv1a32(text: string): number {
  const bytes = Buffer.from(text, "utf8");
  let hash = 0x811c9dc5;
  for (const byte of bytes) {
    hash ^= byte;
    hash = Math.imul(hash, 0x01000193);
  }
  return hash >>> 0;
}

export class MockGammaModel {
  lnGamma(solute: string, solvent: string, temperature: number): number {
    const h = fnv1a32(pairKey(solute, solvent, temperature));
    return LN_GAMMA_MIN + ((LN_GAMMA_MAX - LN_GAMMA_MIN) * h) / 2 ** 32;
  }
}

/**
 * Surface syntactic SMILES check: token alphabet, balanced parentheses and
 * brackets, paired ring-closure digits, and bond placement. This is a
 * plausibility filter for a mock oracle, not a chemistry validator; a real
 * predictor plugged in behind `GammaModel` would do its own parsing.
 */
export function smilesLooksValid(s: string): boolean {
  if (s.length === 0) return false;
  const atomStart = /^(Cl|Br|[BCNOPSFI]|[bcnops]|\[[^\]]+\])/;
  const ringOpen = new Set<string>();
  let depth = 0;
  let seenAtom = false;
  let pendingBond = false;
  let i = 0;
  while (i < s.length) {
    const rest = s.slice(i);
    const atom = rest.match(atomStart);
    if (atom) {
      seenAtom = true;
      pendingBond = false;
      i += atom[0].length;
      continue;
    }
    const ch = s[i];
    if (ch === "-" || ch === "=" || ch === "#") {
      if (pendingBond || !seenAtom) return false;
      pendingBond = true;
      i += 1;
      continue;
    }
    if (ch === "(") {
      if (!seenAtom || pendingBond) return false;
      depth += 1;
      i += 1;
      continue;
    }
    if (ch === ")") {
      if (depth === 0 || pendingBond) return false;
      depth -= 1;
      i += 1;
      continue;
    }
    if (ch >= "1" && ch <= "9") {
      if (!seenAtom) return false;
      if (ringOpen.has(ch)) ringOpen.delete(ch);
      else ringOpen.add(ch);
      pendingBond = false;
      i += 1;
      continue;
    }
    if (ch === "%") {
      const digits = s.slice(i + 1, i + 3);
      if (!/^\d\d$/.test(digits) || !seenAtom) return false;
      if (ringOpen.has(digits)) ringOpen.delete(digits);
      else ringOpen.add(digits);
      pendingBond = false;
      i += 3;
      continue;
    }
    return false;
  }
  return seenAtom && depth === 0 && !pendingBond && ringOpen.size === 0;
}

export interface GammaModel {
  lnGamma(solute: string, solvent: string, temperature: number): number | null;
}

/** Replays exact values from a table; pairs not listed answer null. */
export class FixtureModel implements GammaModel {
  private table: Map<string, number>;

  constructor(entries: Record<string, number>) {
    this.table = new Map(Object.entries(entries));
  }

  lnGamma(solute: string, solvent: string, temperature: number): number | null {
    const value = this.table.get(pairKey(solute, solvent, temperature));
    return value === undefined ? null : value;
  }
}
