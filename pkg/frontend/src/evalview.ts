// Evaluation view: hit@k bars with confidence whiskers and numeric
// annotations, paired-quartile score distributions with cumulative
// counts, and the held-out ranking table. Hidden with a note when the
// bundle carries no evaluation report.

import type { EvalResponse } from './api';
import { renderBars, renderQuartiles } from './charts';
import { fmtScore } from './format';

export class EvalView {
  private root: HTMLElement;

  constructor(root: HTMLElement) {
    this.root = root;
  }

  renderAbsent(): void {
    this.root.textContent = '';
    const note = document.createElement('p');
    note.className = 'eval-absent';
    note.textContent =
      'No evaluation report in this bundle; run the evaluation stage to populate this view.';
    this.root.appendChild(note);
  }

  render(payload: EvalResponse): void {
    this.root.textContent = '';
    const heading = document.createElement('h2');
    heading.textContent = 'Masked-link evaluation';
    this.root.appendChild(heading);

    if (payload.report) {
      const section = document.createElement('section');
      section.className = 'hit-at-section';
      const title = document.createElement('h3');
      title.textContent = `hit@k over ${payload.report.folds} folds`;
      section.appendChild(title);
      const chart = document.createElement('div');
      chart.className = 'hit-at-chart';
      const ks = Object.keys(payload.report.hit_at).sort((a, b) => Number(a) - Number(b));
      renderBars(
        chart,
        ks.map((k) => ({
          label: `hit@${k}`,
          value: payload.report!.hit_at[k],
          low: payload.report!.ci95[k][0],
          high: payload.report!.ci95[k][1],
        })),
      );
      section.appendChild(chart);
      this.root.appendChild(section);
    }

    if (payload.separation) {
      const section = document.createElement('section');
      section.className = 'separation-section';
      const title = document.createElement('h3');
      title.textContent = 'Score separation (median and quartile lines, cumulative counts)';
      section.appendChild(title);
      const chart = document.createElement('div');
      chart.className = 'separation-chart';
      renderQuartiles(chart, [
        {
          label: 'positive',
          quartiles: payload.separation.positive_quartiles,
          counts: payload.separation.positive_counts,
          total: payload.separation.positive_scores.length,
        },
        {
          label: 'negative',
          quartiles: payload.separation.negative_quartiles,
          counts: payload.separation.negative_counts,
          total: payload.separation.negative_scores.length,
        },
      ]);
      section.appendChild(chart);
      this.root.appendChild(section);
    }

    if (payload.ranking) {
      const section = document.createElement('section');
      section.className = 'ranking-section';
      const title = document.createElement('h3');
      title.textContent = 'Held-out material ranking';
      section.appendChild(title);
      const table = document.createElement('table');
      table.className = 'ranking-table';
      const head = table.createTHead().insertRow();
      for (const column of ['material', 'set', 'mean score']) {
        head.insertCell().textContent = column;
      }
      const rows = table.createTBody();
      for (const [material, setLabel, score] of payload.ranking.rows) {
        const row = rows.insertRow();
        row.insertCell().textContent = material;
        row.insertCell().textContent = setLabel;
        const cell = row.insertCell();
        cell.className = 'ranking-score';
        cell.textContent = fmtScore(score);
      }
      section.appendChild(table);
      this.root.appendChild(section);
    }
  }
}
