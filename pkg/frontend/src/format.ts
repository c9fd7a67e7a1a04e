export function fmt(value: number | null | undefined, digits = 4): string {
  if (value === null || value === undefined || Number.isNaN(value)) return "–";
  if (value === 0) return "0";
  const abs = Math.abs(value);
  if (abs >= 0.001 && abs < 10000) return value.toFixed(digits);
  return value.toExponential(2);
}

export function pct(value: number | null | undefined, digits = 1): string {
  if (value === null || value === undefined || Number.isNaN(value)) return "–";
  return (100 * value).toFixed(digits) + "%";
}

export function ciText(low: number | null, high: number | null): string {
  if (low === null || high === null) return "";
  return `[${fmt(low)}, ${fmt(high)}]`;
}
