// Results panel: focused-cluster header plus Summary / Attributes /
// Documents / Predictions tabs. The panel renders API payloads as-is;
// the only client-side work is formatting and set-membership filtering.

import type {
  DocRecord,
  DocumentsPage,
  FacetResponse,
  NodeDetail,
  PredictionRow,
} from './api';
import { renderPie } from './charts';
import { fmtCount, fmtScore, fmtWeight } from './format';
import type { TabName, ViewState } from './state';

export interface ResultsCallbacks {
  onTab(tab: TabName): void;
  onFacetPick(facet: string): void;
  onSlice(facet: string, value: string): void;
  onPage(offset: number): void;
  onCopyDocs(ids: string[]): void;
}

export interface ResultsData {
  detail: NodeDetail | null;
  facet: FacetResponse | null;
  documents: DocumentsPage | null;
  predictions: PredictionRow[];
  workingSetSize: number;
  facets: string[];
}

const TABS: TabName[] = ['summary', 'attributes', 'documents', 'predictions'];

export class ResultsPanel {
  private root: HTMLElement;
  private callbacks: ResultsCallbacks;

  constructor(root: HTMLElement, callbacks: ResultsCallbacks) {
    this.root = root;
    this.callbacks = callbacks;
  }

  render(state: ViewState, data: ResultsData): void {
    this.root.textContent = '';
    if (!data.detail) {
      this.root.appendChild(
        message('empty-state', 'No working set: search, filter, or pick clusters to begin.'),
      );
      return;
    }

    const header = document.createElement('header');
    header.className = 'results-header';
    const title = document.createElement('h2');
    title.className = 'focused-cluster';
    title.textContent = data.detail.path_id;
    header.appendChild(title);
    const size = document.createElement('span');
    size.className = 'focused-size';
    size.textContent = `${fmtCount(data.detail.size)} documents`;
    header.appendChild(size);
    const copy = document.createElement('button');
    copy.type = 'button';
    copy.className = 'copy-docs';
    copy.textContent = 'Copy document set';
    copy.addEventListener('click', () =>
      this.callbacks.onCopyDocs(data.documents?.documents.map((d) => d.id) ?? []),
    );
    header.appendChild(copy);
    this.root.appendChild(header);

    const tabs = document.createElement('nav');
    tabs.className = 'tabs';
    for (const tab of TABS) {
      const button = document.createElement('button');
      button.type = 'button';
      button.textContent = tab;
      button.dataset.tab = tab;
      button.className = tab === state.activeTab ? 'active' : '';
      button.addEventListener('click', () => this.callbacks.onTab(tab));
      tabs.appendChild(button);
    }
    this.root.appendChild(tabs);

    const body = document.createElement('div');
    body.className = 'tab-body';
    switch (state.activeTab) {
      case 'summary':
        this.renderSummary(body, data.detail);
        break;
      case 'attributes':
        this.renderAttributes(body, state, data);
        break;
      case 'documents':
        this.renderDocuments(body, state, data);
        break;
      case 'predictions':
        this.renderPredictions(body, data);
        break;
    }
    this.root.appendChild(body);
  }

  private renderSummary(body: HTMLElement, detail: NodeDetail): void {
    const table = document.createElement('table');
    table.className = 'token-table';
    const head = table.createTHead().insertRow();
    head.insertCell().textContent = 'token';
    head.insertCell().textContent = 'weight';
    const rows = table.createTBody();
    for (const { token, weight } of detail.top_tokens) {
      const row = rows.insertRow();
      row.insertCell().textContent = token;
      const cell = row.insertCell();
      cell.className = 'token-weight';
      cell.textContent = fmtWeight(weight);
    }
    body.appendChild(table);
  }

  private renderAttributes(body: HTMLElement, state: ViewState, data: ResultsData): void {
    const picker = document.createElement('select');
    picker.className = 'facet-picker';
    for (const facet of data.facets) {
      const opt = document.createElement('option');
      opt.value = facet;
      opt.textContent = facet;
      picker.appendChild(opt);
    }
    if (state.activeFacet) picker.value = state.activeFacet;
    picker.addEventListener('change', () => this.callbacks.onFacetPick(picker.value));
    body.appendChild(picker);

    const chart = document.createElement('div');
    chart.className = 'facet-chart';
    if (!data.facet || !data.facet.values.length) {
      chart.appendChild(message('no-data', 'No data for this facet.'));
    } else {
      const facetName = data.facet.facet;
      renderPie(chart, data.facet.values, (value) =>
        this.callbacks.onSlice(facetName, value),
      );
    }
    body.appendChild(chart);
  }

  private renderDocuments(body: HTMLElement, state: ViewState, data: ResultsData): void {
    const page = data.documents;
    if (!page || page.total === 0) {
      body.appendChild(message('no-data', 'No documents in the working set.'));
      return;
    }
    const table = document.createElement('table');
    table.className = 'doc-table';
    const head = table.createTHead().insertRow();
    for (const column of ['id', 'title', 'materials']) {
      head.insertCell().textContent = column;
    }
    const rows = table.createTBody();
    for (const doc of page.documents) {
      const row = rows.insertRow();
      row.dataset.docId = doc.id;
      row.insertCell().textContent = doc.id;
      row.insertCell().textContent = doc.title;
      row.insertCell().textContent = (doc.attributes.material ?? []).join(', ');
    }
    body.appendChild(table);

    const pager = document.createElement('div');
    pager.className = 'pager';
    const prev = document.createElement('button');
    prev.type = 'button';
    prev.textContent = 'prev';
    prev.disabled = page.offset === 0;
    prev.addEventListener('click', () =>
      this.callbacks.onPage(Math.max(0, page.offset - page.limit)),
    );
    pager.appendChild(prev);
    const status = document.createElement('span');
    status.className = 'pager-status';
    const last = Math.min(page.offset + page.documents.length, page.total);
    status.textContent = `${page.offset + 1}-${last} of ${fmtCount(page.total)}`;
    pager.appendChild(status);
    const next = document.createElement('button');
    next.type = 'button';
    next.textContent = 'next';
    next.disabled = page.offset + page.limit >= page.total;
    next.addEventListener('click', () => this.callbacks.onPage(page.offset + page.limit));
    pager.appendChild(next);
    body.appendChild(pager);
  }

  private renderPredictions(body: HTMLElement, data: ResultsData): void {
    if (!data.predictions.length) {
      body.appendChild(message('no-data', 'No unknown-cell predictions for this working set.'));
      return;
    }
    const table = document.createElement('table');
    table.className = 'prediction-table';
    const head = table.createTHead().insertRow();
    for (const column of ['topic', 'material', 'score', 'support']) {
      head.insertCell().textContent = column;
    }
    const rows = table.createTBody();
    for (const pred of data.predictions) {
      const row = rows.insertRow();
      row.insertCell().textContent = pred.topic;
      row.insertCell().textContent = pred.material;
      const scoreCell = row.insertCell();
      scoreCell.className = 'prediction-score';
      scoreCell.dataset.score = String(pred.score);
      const bar = document.createElement('span');
      bar.className = 'score-bar';
      bar.style.width = `${Math.round(pred.score * 100)}px`;
      scoreCell.appendChild(bar);
      const label = document.createElement('span');
      label.className = 'score-label';
      label.textContent = fmtScore(pred.score);
      scoreCell.appendChild(label);
      const prov = row.insertCell();
      prov.className = 'prediction-support';
      prov.textContent = fmtCount(pred.provenance);
    }
    body.appendChild(table);
  }
}

export function filterPredictionsToWorkingSet(
  predictions: PredictionRow[],
  workingDocs: DocRecord[],
): PredictionRow[] {
  // "materials in the working set" = materials tagged on its documents
  const materials = new Set<string>();
  for (const doc of workingDocs) {
    for (const m of doc.attributes.material ?? []) materials.add(m);
  }
  if (!materials.size) return [];
  return predictions.filter((p) => materials.has(p.material));
}

function message(className: string, text: string): HTMLElement {
  const node = document.createElement('p');
  node.className = className;
  node.textContent = text;
  return node;
}
