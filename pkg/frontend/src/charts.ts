// Small dependency-free SVG renderers. Each datum element carries its
// source values in data- attributes so tests can trace every rendered
// number back to one API field.

import type { FacetValue } from './api';
import { fmtCount, fmtPercent, fmtScore } from './format';

const SVG_NS = 'http://www.w3.org/2000/svg';

const PALETTE = [
  '#4c78a8', '#f58518', '#54a24b', '#e45756', '#72b7b2',
  '#eeca3b', '#b279a2', '#ff9da6', '#9d755d', '#bab0ac',
];

function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) el.setAttribute(key, value);
  return el;
}

export interface SliceHandler {
  (value: string): void;
}

/** Facet pie with hover counts; clicking a slice filters downstream views. */
export function renderPie(
  container: HTMLElement,
  values: FacetValue[],
  onSlice?: SliceHandler,
): void {
  container.textContent = '';
  if (!values.length) return;
  const size = 240;
  const radius = 90;
  const cx = size / 2;
  const cy = size / 2;
  const svg = svgEl('svg', {
    viewBox: `0 0 ${size} ${size}`,
    width: String(size),
    height: String(size),
    class: 'pie',
  });
  const total = values.reduce((acc, v) => acc + v.count, 0);
  let angle = -Math.PI / 2;
  values.forEach((entry, i) => {
    const span = total > 0 ? (entry.count / total) * 2 * Math.PI : 0;
    const x1 = cx + radius * Math.cos(angle);
    const y1 = cy + radius * Math.sin(angle);
    const x2 = cx + radius * Math.cos(angle + span);
    const y2 = cy + radius * Math.sin(angle + span);
    const large = span > Math.PI ? 1 : 0;
    const path = svgEl('path', {
      d:
        values.length === 1
          ? `M ${cx - radius} ${cy} a ${radius} ${radius} 0 1 0 ${radius * 2} 0 a ${radius} ${radius} 0 1 0 ${-radius * 2} 0`
          : `M ${cx} ${cy} L ${x1} ${y1} A ${radius} ${radius} 0 ${large} 1 ${x2} ${y2} Z`,
      fill: PALETTE[i % PALETTE.length],
      class: 'pie-slice',
      'data-value': entry.value,
      'data-count': String(entry.count),
      'data-percentage': String(entry.percentage),
    });
    // hover shows counts
    const title = svgEl('title');
    title.textContent = `${entry.value}: ${fmtCount(entry.count)} (${fmtPercent(entry.percentage)})`;
    path.appendChild(title);
    if (onSlice) path.addEventListener('click', () => onSlice(entry.value));
    svg.appendChild(path);
    angle += span;
  });
  container.appendChild(svg);

  const legend = document.createElement('ul');
  legend.className = 'pie-legend';
  values.forEach((entry, i) => {
    const item = document.createElement('li');
    item.className = 'pie-legend-item';
    item.dataset.value = entry.value;
    const swatch = document.createElement('span');
    swatch.className = 'swatch';
    swatch.style.background = PALETTE[i % PALETTE.length];
    item.appendChild(swatch);
    const label = document.createElement('span');
    label.textContent = `${entry.value} `;
    item.appendChild(label);
    const pct = document.createElement('span');
    pct.className = 'legend-percentage';
    pct.textContent = fmtPercent(entry.percentage);
    item.appendChild(pct);
    const count = document.createElement('span');
    count.className = 'legend-count';
    count.textContent = ` (${fmtCount(entry.count)})`;
    item.appendChild(count);
    if (onSlice) item.addEventListener('click', () => onSlice(entry.value));
    legend.appendChild(item);
  });
  container.appendChild(legend);
}

export interface BarEntry {
  label: string;
  value: number; // in [0, 1]
  low: number;
  high: number;
}

/** Annotated bars with confidence whiskers for the hit@k report. */
export function renderBars(container: HTMLElement, entries: BarEntry[]): void {
  container.textContent = '';
  const barWidth = 72;
  const gap = 36;
  const height = 220;
  const plotHeight = 170;
  const width = entries.length * (barWidth + gap) + gap;
  const svg = svgEl('svg', {
    viewBox: `0 0 ${width} ${height}`,
    width: String(width),
    height: String(height),
    class: 'bars',
  });
  const y = (v: number) => 20 + (1 - Math.max(0, Math.min(1, v))) * plotHeight;
  entries.forEach((entry, i) => {
    const x = gap + i * (barWidth + gap);
    svg.appendChild(
      svgEl('rect', {
        x: String(x),
        y: String(y(entry.value)),
        width: String(barWidth),
        height: String(20 + plotHeight - y(entry.value)),
        class: 'bar',
        fill: PALETTE[i % PALETTE.length],
        'data-label': entry.label,
        'data-value': String(entry.value),
      }),
    );
    const mid = x + barWidth / 2;
    svg.appendChild(
      svgEl('line', {
        x1: String(mid), x2: String(mid),
        y1: String(y(entry.low)), y2: String(y(entry.high)),
        class: 'whisker', stroke: '#333',
      }),
    );
    const annotation = svgEl('text', {
      x: String(mid),
      y: String(y(entry.value) - 6),
      'text-anchor': 'middle',
      class: 'bar-annotation',
      'data-label': entry.label,
    });
    annotation.textContent = fmtScore(entry.value);
    svg.appendChild(annotation);
    const axis = svgEl('text', {
      x: String(mid),
      y: String(height - 4),
      'text-anchor': 'middle',
      class: 'bar-axis-label',
    });
    axis.textContent = entry.label;
    svg.appendChild(axis);
  });
  container.appendChild(svg);
}

export interface QuartileEntry {
  label: string;
  quartiles: [number, number, number];
  counts: [number, number, number]; // cumulative counts at each boundary
  total: number;
}

/** Paired quartile rendering of the positive vs negative score
 * distributions: median and 25th/75th lines with cumulative counts. */
export function renderQuartiles(container: HTMLElement, entries: QuartileEntry[]): void {
  container.textContent = '';
  const columnWidth = 130;
  const height = 260;
  const plotHeight = 200;
  const width = entries.length * columnWidth + 40;
  const svg = svgEl('svg', {
    viewBox: `0 0 ${width} ${height}`,
    width: String(width),
    height: String(height),
    class: 'quartiles',
  });
  const y = (v: number) => 20 + (1 - Math.max(0, Math.min(1, v))) * plotHeight;
  entries.forEach((entry, i) => {
    const x0 = 30 + i * columnWidth;
    const x1 = x0 + columnWidth - 50;
    svg.appendChild(
      svgEl('rect', {
        x: String(x0),
        y: String(y(entry.quartiles[2])),
        width: String(x1 - x0),
        height: String(Math.max(1, y(entry.quartiles[0]) - y(entry.quartiles[2]))),
        class: 'quartile-box',
        fill: PALETTE[i % PALETTE.length],
        'fill-opacity': '0.35',
      }),
    );
    (['q25', 'median', 'q75'] as const).forEach((name, qi) => {
      const value = entry.quartiles[qi];
      svg.appendChild(
        svgEl('line', {
          x1: String(x0), x2: String(x1),
          y1: String(y(value)), y2: String(y(value)),
          class: `quartile-line quartile-${name}`,
          stroke: '#222',
          'stroke-width': name === 'median' ? '2.5' : '1',
          'data-class': entry.label,
          'data-quartile': name,
          'data-value': String(value),
        }),
      );
      const text = svgEl('text', {
        x: String(x1 + 4),
        y: String(y(value) + 4),
        class: `quartile-value quartile-value-${name}`,
        'data-class': entry.label,
        'data-quartile': name,
      });
      text.textContent = fmtScore(value);
      svg.appendChild(text);
      const countText = svgEl('text', {
        x: String(x0 - 4),
        y: String(y(value) + 4),
        'text-anchor': 'end',
        class: `quartile-count quartile-count-${name}`,
        'data-class': entry.label,
        'data-quartile': name,
      });
      countText.textContent = fmtCount(entry.counts[qi]);
      svg.appendChild(countText);
    });
    const label = svgEl('text', {
      x: String((x0 + x1) / 2),
      y: String(height - 6),
      'text-anchor': 'middle',
      class: 'quartile-label',
    });
    label.textContent = `${entry.label} (n=${fmtCount(entry.total)})`;
    svg.appendChild(label);
  });
  container.appendChild(svg);
}
