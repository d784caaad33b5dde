/** Number-to-text rules.  Table cells must match the service payload
 * byte-for-byte once integer-formatted, so `cellText` is the exact
 * JavaScript rendering of the payload number. */

export function cellText(value: number): string {
  return String(value);
}

/** Grouped display for labels/axes only, never for payload cells. */
export function grouped(value: number): string {
  const rounded = Math.round(value);
  const sign = rounded < 0 ? "-" : "";
  const digits = Math.abs(rounded).toString();
  const parts: string[] = [];
  for (let i = digits.length; i > 0; i -= 3) {
    parts.unshift(digits.slice(Math.max(0, i - 3), i));
  }
  return `${sign}${parts.join(" ")}`;
}

export function alphaLabel(alpha: number): string {
  return alpha.toFixed(3).replace(/0+$/, "").replace(/\.$/, "");
}
