/** Minimal linear and log10 axis scales with deterministic tick layout. */

export interface Scale {
  (value: number): number;
  ticks: number[];
  kind: "linear" | "log";
  domain: [number, number];
  range: [number, number];
}

export function linearScale(
  domain: [number, number],
  range: [number, number],
  ticks?: number[],
): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const fn = ((value: number) => r0 + ((value - d0) / span) * (r1 - r0)) as Scale;
  fn.ticks = ticks ?? defaultLinearTicks(d0, d1);
  fn.kind = "linear";
  fn.domain = domain;
  fn.range = range;
  return fn;
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  if (d0 <= 0 || d1 <= 0) {
    throw new Error(`log scale needs positive domain, got [${d0}, ${d1}]`);
  }
  const l0 = Math.log10(d0);
  const l1 = Math.log10(d1);
  const span = l1 - l0 || 1;
  const [r0, r1] = range;
  const fn = ((value: number) =>
    r0 + ((Math.log10(value) - l0) / span) * (r1 - r0)) as Scale;
  fn.ticks = decadeTicks(d0, d1);
  fn.kind = "log";
  fn.domain = domain;
  fn.range = range;
  return fn;
}

function defaultLinearTicks(lo: number, hi: number, count = 6): number[] {
  if (lo === hi) return [lo];
  const step = (hi - lo) / (count - 1);
  return Array.from({ length: count }, (_, i) => lo + i * step);
}

/** Powers of ten covering [lo, hi]. */
export function decadeTicks(lo: number, hi: number): number[] {
  const first = Math.ceil(Math.log10(lo) - 1e-9);
  const last = Math.floor(Math.log10(hi) + 1e-9);
  const out: number[] = [];
  for (let e = first; e <= last; e++) {
    out.push(Math.pow(10, e));
  }
  return out.length > 0 ? out : [lo];
}

export function formatTick(value: number, kind: "linear" | "log"): string {
  if (kind === "log") {
    const exp = Math.round(Math.log10(value));
    return `1e${exp}`;
  }
  return Number.isInteger(value) ? String(value) : String(Number(value.toPrecision(4)));
}
