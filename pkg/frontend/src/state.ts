// Client view state, serializable to the URL so any view is shareable.

import type { NodeSummary, SearchRequest } from './api';

export type TabName = 'summary' | 'attributes' | 'documents' | 'predictions';

export interface ViewState {
  tokens: string[];
  mode: 'keywords' | 'denovo';
  logic: 'and' | 'or';
  topN: number | null; // null = all ranked tokens per node
  facetFilters: Record<string, string[]>;
  selectedClusters: string[];
  focus: string | null; // node whose detail fills the results header
  activeTab: TabName;
  activeFacet: string | null;
  docOffset: number;
}

export function defaultState(): ViewState {
  return {
    tokens: [],
    mode: 'keywords',
    logic: 'or',
    topN: 10,
    facetFilters: {},
    selectedClusters: [],
    focus: null,
    activeTab: 'summary',
    activeFacet: null,
    docOffset: 0,
  };
}

export function encodeState(state: ViewState): string {
  const params = new URLSearchParams();
  if (state.tokens.length) params.set('q', state.tokens.join(' '));
  if (state.mode !== 'keywords') params.set('mode', state.mode);
  if (state.logic !== 'or') params.set('logic', state.logic);
  if (state.topN !== null) params.set('topn', String(state.topN));
  for (const [facet, values] of Object.entries(state.facetFilters)) {
    if (values.length) params.set(`f.${facet}`, values.join('|'));
  }
  if (state.selectedClusters.length) params.set('sel', state.selectedClusters.join('|'));
  if (state.focus) params.set('focus', state.focus);
  if (state.activeTab !== 'summary') params.set('tab', state.activeTab);
  if (state.activeFacet) params.set('facet', state.activeFacet);
  if (state.docOffset) params.set('off', String(state.docOffset));
  return params.toString();
}

export function decodeState(query: string): ViewState {
  const params = new URLSearchParams(query);
  const state = defaultState();
  const q = params.get('q');
  if (q) state.tokens = q.split(' ').filter(Boolean);
  if (params.get('mode') === 'denovo') state.mode = 'denovo';
  if (params.get('logic') === 'and') state.logic = 'and';
  const topn = params.get('topn');
  state.topN = topn === null ? null : Number(topn);
  for (const [key, value] of params.entries()) {
    if (key.startsWith('f.')) {
      state.facetFilters[key.slice(2)] = value.split('|').filter(Boolean);
    }
  }
  const sel = params.get('sel');
  if (sel) state.selectedClusters = sel.split('|').filter(Boolean);
  state.focus = params.get('focus');
  const tab = params.get('tab');
  if (tab === 'attributes' || tab === 'documents' || tab === 'predictions') {
    state.activeTab = tab;
  }
  state.activeFacet = params.get('facet');
  const off = params.get('off');
  if (off) state.docOffset = Number(off);
  return state;
}

export function toSearchRequest(state: ViewState): SearchRequest {
  return {
    tokens: state.tokens,
    mode: state.mode,
    logic: state.logic,
    top_n: state.topN,
    facet_filters: state.facetFilters,
    selected_clusters: state.selectedClusters,
  };
}

export function hasQuery(state: ViewState): boolean {
  return (
    state.tokens.length > 0 ||
    Object.values(state.facetFilters).some((v) => v.length > 0) ||
    state.selectedClusters.length > 0
  );
}

/** Drop selected clusters that do not exist in the loaded tree. */
export function pruneSelection(state: ViewState, root: NodeSummary): ViewState {
  const known = new Set<string>();
  const stack = [root];
  while (stack.length) {
    const node = stack.pop()!;
    known.add(node.path_id);
    stack.push(...node.children);
  }
  return {
    ...state,
    selectedClusters: state.selectedClusters.filter((id) => known.has(id)),
    focus: state.focus && known.has(state.focus) ? state.focus : null,
  };
}
