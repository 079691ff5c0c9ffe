// Hand-rolled SVG output: deterministic string assembly, no timestamps or
// generator metadata, so identical inputs produce identical files.

export interface Margins {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

export const DEFAULT_MARGINS: Margins = { top: 40, right: 30, bottom: 50, left: 70 };

const fmt = (x: number): string => {
  const rounded = Math.round(x * 100) / 100;
  return Object.is(rounded, -0) ? "0" : String(rounded);
};

export function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function circle(cx: number, cy: number, r: number, fill: string): string {
  return `<circle cx="${fmt(cx)}" cy="${fmt(cy)}" r="${fmt(r)}" fill="${fill}"/>`;
}

export function rect(x: number, y: number, w: number, h: number, fill: string): string {
  return `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" fill="${fill}"/>`;
}

export function line(x1: number, y1: number, x2: number, y2: number, stroke: string, width = 1): string {
  return `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" stroke="${stroke}" stroke-width="${fmt(width)}"/>`;
}

export function polyline(points: Array<[number, number]>, stroke: string, width = 1.5): string {
  const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
  return `<polyline points="${pts}" fill="none" stroke="${stroke}" stroke-width="${fmt(width)}"/>`;
}

export function text(
  x: number,
  y: number,
  content: string,
  options: { anchor?: string; size?: number; rotate?: boolean } = {},
): string {
  const anchor = options.anchor ?? "middle";
  const size = options.size ?? 12;
  const transform = options.rotate ? ` transform="rotate(-90 ${fmt(x)} ${fmt(y)})"` : "";
  return `<text x="${fmt(x)}" y="${fmt(y)}" text-anchor="${anchor}" font-size="${size}" font-family="sans-serif"${transform}>${esc(content)}</text>`;
}

export function document(width: number, height: number, body: string[]): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
    rect(0, 0, width, height, "white"),
    ...body,
    "</svg>",
    "",
  ].join("\n");
}

export interface LinearScale {
  (value: number): number;
  domain: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): LinearScale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const scale = ((value: number) => r0 + ((value - d0) / span) * (r1 - r0)) as LinearScale;
  scale.domain = domain;
  return scale;
}

export function ticks(lo: number, hi: number, count = 6): number[] {
  if (lo === hi) {
    return [lo];
  }
  const step = niceStep((hi - lo) / Math.max(1, count));
  const start = Math.ceil(lo / step) * step;
  const out: number[] = [];
  for (let v = start; v <= hi + step * 1e-9; v += step) {
    out.push(Math.round(v * 1e6) / 1e6);
  }
  return out;
}

function niceStep(raw: number): number {
  const power = Math.pow(10, Math.floor(Math.log10(raw)));
  const unit = raw / power;
  if (unit <= 1) return power;
  if (unit <= 2) return 2 * power;
  if (unit <= 5) return 5 * power;
  return 10 * power;
}

export function axes(
  width: number,
  height: number,
  margins: Margins,
  x: LinearScale,
  y: LinearScale,
  labels: { title: string; xLabel: string; yLabel: string },
  yTickFormat: (v: number) => string = String,
): string[] {
  const body: string[] = [];
  const x0 = margins.left;
  const x1 = width - margins.right;
  const y0 = height - margins.bottom;
  const y1 = margins.top;
  body.push(line(x0, y0, x1, y0, "#222"));
  body.push(line(x0, y0, x0, y1, "#222"));
  for (const v of ticks(x.domain[0], x.domain[1])) {
    const px = x(v);
    body.push(line(px, y0, px, y0 + 5, "#222"));
    body.push(text(px, y0 + 20, String(v), { size: 11 }));
  }
  for (const v of ticks(y.domain[0], y.domain[1])) {
    const py = y(v);
    body.push(line(x0 - 5, py, x0, py, "#222"));
    body.push(text(x0 - 9, py + 4, yTickFormat(v), { anchor: "end", size: 11 }));
  }
  body.push(text((x0 + x1) / 2, height - 12, labels.xLabel));
  body.push(text(18, (y0 + y1) / 2, labels.yLabel, { rotate: true }));
  body.push(text((x0 + x1) / 2, 22, labels.title, { size: 14 }));
  return body;
}
