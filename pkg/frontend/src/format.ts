// The single place display precision is decided: every rendered number
// is one of these formattings of one API field.

export function fmtScore(value: number): string {
  return value.toFixed(3);
}

export function fmtPercent(value: number): string {
  return `${value.toFixed(1)}%`;
}

export function fmtCount(value: number): string {
  return String(value);
}

export function fmtWeight(value: number): string {
  return value.toFixed(3);
}
