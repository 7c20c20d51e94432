// Orchestration: state changes issue API calls, stale in-flight
// requests are aborted (last write wins), and any failure surfaces as
// a persistent banner with retry instead of a partially stale view.

import { ApiClient, ApiError } from './api';
import type {
  DocumentsPage,
  EvalResponse,
  FacetResponse,
  MetaResponse,
  NodeDetail,
  PredictionRow,
  SearchResponse,
  TreeResponse,
} from './api';
import { EvalView } from './evalview';
import { ResultsPanel, filterPredictionsToWorkingSet } from './results';
import { Sidebar } from './sidebar';
import {
  ViewState,
  decodeState,
  defaultState,
  encodeState,
  hasQuery,
  pruneSelection,
  toSearchRequest,
} from './state';

export class App {
  readonly state: { current: ViewState };

  private api: ApiClient;
  private root: HTMLElement;
  private banner!: HTMLElement;
  private sidebar!: Sidebar;
  private sidebarEl!: HTMLElement;
  private results!: ResultsPanel;
  private evalView!: EvalView;
  private meta: MetaResponse | null = null;
  private tree: TreeResponse | null = null;
  private evalPayload: EvalResponse | null = null;
  private inflight: AbortController | null = null;
  private generation = 0;

  constructor(root: HTMLElement, api: ApiClient, initialQuery = '') {
    this.root = root;
    this.api = api;
    this.state = { current: initialQuery ? decodeState(initialQuery) : defaultState() };
    this.buildLayout();
  }

  private buildLayout(): void {
    this.root.textContent = '';
    this.banner = document.createElement('div');
    this.banner.className = 'banner hidden';
    this.root.appendChild(this.banner);

    const layout = document.createElement('div');
    layout.className = 'layout';
    this.sidebarEl = document.createElement('aside');
    this.sidebarEl.className = 'sidebar';
    layout.appendChild(this.sidebarEl);

    const mainEl = document.createElement('main');
    mainEl.className = 'main';
    const resultsEl = document.createElement('section');
    resultsEl.className = 'results';
    mainEl.appendChild(resultsEl);
    const evalEl = document.createElement('section');
    evalEl.className = 'evaluation';
    mainEl.appendChild(evalEl);
    layout.appendChild(mainEl);
    this.root.appendChild(layout);

    this.sidebar = new Sidebar(this.sidebarEl, {
      onPatch: (patch) => this.patch(patch),
      onToggleCluster: (pathId, selected) => {
        const next = new Set(this.state.current.selectedClusters);
        if (selected) next.add(pathId);
        else next.delete(pathId);
        void this.patch({ selectedClusters: [...next].sort(), docOffset: 0 });
      },
      onFacetFilter: (facet, value) => {
        const filters = { ...this.state.current.facetFilters };
        if (value) filters[facet] = [value];
        else delete filters[facet];
        void this.patch({ facetFilters: filters, docOffset: 0 });
      },
    });
    this.results = new ResultsPanel(resultsEl, {
      onTab: (tab) => this.patch({ activeTab: tab }),
      onFacetPick: (facet) => this.patch({ activeFacet: facet }),
      onSlice: (facet, value) =>
        this.patch({
          facetFilters: { ...this.state.current.facetFilters, [facet]: [value] },
          docOffset: 0,
        }),
      onPage: (offset) => this.patch({ docOffset: offset }),
      onCopyDocs: (ids) => this.copyDocumentSet(ids),
    });
    this.evalView = new EvalView(evalEl);
  }

  async start(): Promise<void> {
    try {
      this.meta = await this.api.meta();
      this.tree = await this.api.tree();
      this.state.current = pruneSelection(this.state.current, this.tree.root);
      if (!this.state.current.activeFacet && this.meta.facets.length) {
        this.state.current.activeFacet = this.meta.facets[0];
      }
      this.hideBanner();
    } catch (err) {
      this.showBanner(err as Error);
      return;
    }
    await this.loadEval();
    await this.refresh();
  }

  private async loadEval(): Promise<void> {
    try {
      this.evalPayload = await this.api.evalReport();
      this.evalView.render(this.evalPayload);
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) {
        this.evalView.renderAbsent();
      } else {
        this.showBanner(err as Error);
      }
    }
  }

  patch(patch: Partial<ViewState>): Promise<void> {
    this.state.current = { ...this.state.current, ...patch };
    this.writeUrl();
    return this.refresh();
  }

  private writeUrl(): void {
    const encoded = encodeState(this.state.current);
    if (typeof history !== 'undefined' && history.replaceState) {
      history.replaceState(null, '', encoded ? `?${encoded}` : location.pathname);
    }
  }

  async refresh(): Promise<void> {
    if (!this.meta || !this.tree) return;
    const state = this.state.current;
    const generation = ++this.generation;
    this.inflight?.abort();
    this.inflight = new AbortController();

    let working: SearchResponse = { nodes: [], documents: [] };
    try {
      if (hasQuery(state)) {
        working = await this.api.search(toSearchRequest(state), this.inflight.signal);
      }
      if (generation !== this.generation) return; // superseded

      const focusId =
        state.focus && working.nodes.some((n) => n.path_id === state.focus)
          ? state.focus
          : (working.nodes[0]?.path_id ?? state.focus);

      let detail: NodeDetail | null = null;
      let facet: FacetResponse | null = null;
      let documents: DocumentsPage | null = null;
      let predictions: PredictionRow[] = [];
      if (focusId) {
        detail = await this.api.node(focusId);
        if (state.activeTab === 'attributes' && state.activeFacet) {
          facet = await this.api.facets(focusId, state.activeFacet);
          this.sidebar.registerFacetValues(
            state.activeFacet,
            facet.values.map((v) => v.value),
          );
        }
        if (state.activeTab === 'documents') {
          documents = await this.api.documents(focusId, state.docOffset, 20);
        }
        if (state.activeTab === 'predictions' && this.meta.has_predictions) {
          const payload = await this.api.predictions(50);
          predictions = filterPredictionsToWorkingSet(
            payload.predictions,
            working.documents,
          );
        }
      }
      if (generation !== this.generation) return;

      for (const doc of working.documents) {
        for (const [name, values] of Object.entries(doc.attributes)) {
          this.sidebar.registerFacetValues(name, values);
        }
      }
      this.hideBanner();
      this.sidebar.render(state, this.meta, this.tree.root);
      this.results.render(state, {
        detail,
        facet,
        documents,
        predictions,
        workingSetSize: working.documents.length,
        facets: this.meta.facets,
      });
    } catch (err) {
      if ((err as Error).name === 'AbortError') return;
      this.showBanner(err as Error);
    }
  }

  private copyDocumentSet(ids: string[]): void {
    const payload = JSON.stringify(ids);
    if (typeof navigator !== 'undefined' && navigator.clipboard) {
      void navigator.clipboard.writeText(payload);
    }
  }

  private showBanner(err: Error): void {
    // clear panels so nothing stale shows alongside the failure
    this.sidebarEl.textContent = '';
    for (const panel of this.root.querySelectorAll('.results, .evaluation')) {
      panel.textContent = '';
    }
    this.banner.classList.remove('hidden');
    this.banner.textContent = '';
    const text = document.createElement('span');
    text.textContent = `Service unavailable: ${err.message} `;
    this.banner.appendChild(text);
    const retry = document.createElement('button');
    retry.type = 'button';
    retry.className = 'retry';
    retry.textContent = 'Retry';
    retry.addEventListener('click', () => void this.start());
    this.banner.appendChild(retry);
  }

  private hideBanner(): void {
    this.banner.classList.add('hidden');
    this.banner.textContent = '';
  }
}
