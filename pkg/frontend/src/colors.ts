/** Fixed swatches for the six block colors (top face, left face, right face). */
export const COLOR_SWATCHES: Record<string, { top: string; left: string; right: string }> = {
  red: { top: '#e05252', left: '#a83232', right: '#c24242' },
  blue: { top: '#4f7ddb', left: '#32529e', right: '#3f66ba' },
  green: { top: '#57b75a', left: '#37803a', right: '#479a4a' },
  purple: { top: '#9a62cf', left: '#6b3e96', right: '#8250b2' },
  orange: { top: '#e6943e', left: '#aa6722', right: '#c87d2f' },
  yellow: { top: '#e3cf4a', left: '#a8962c', right: '#c5b239' },
};

export const FALLBACK_SWATCH = { top: '#bbbbbb', left: '#777777', right: '#999999' };

export function swatch(color: string) {
  return COLOR_SWATCHES[color] ?? FALLBACK_SWATCH;
}
