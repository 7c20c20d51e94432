// Mock API fixture: payloads shaped exactly like the service responses,
// plus a fetch stub routing requests to them.

import type {
  DocRecord,
  EvalResponse,
  FacetResponse,
  MetaResponse,
  NodeDetail,
  PredictionRow,
  TreeResponse,
} from '../src/api';

export const metaFixture: MetaResponse = {
  n_documents: 6,
  n_topics: 4,
  facets: ['country', 'material'],
  materials: ['mos2', 'nbse2', 'ws2'],
  has_predictions: true,
  has_eval: true,
};

export const treeFixture: TreeResponse = {
  total_topics: 4,
  root: {
    path_id: 'root',
    depth: 0,
    size: 6,
    stop_reason: 'none',
    children: [
      { path_id: '0', depth: 1, size: 4, stop_reason: 'rank_one', children: [] },
      {
        path_id: '1',
        depth: 1,
        size: 2,
        stop_reason: 'none',
        children: [
          { path_id: '1_0', depth: 2, size: 2, stop_reason: 'min_size', children: [] },
        ],
      },
    ],
  },
};

export const nodeFixture: Record<string, NodeDetail> = {
  '0': {
    path_id: '0',
    depth: 1,
    size: 4,
    local_rank: 1,
    stop_reason: 'rank_one',
    top_tokens: [
      { token: 'superconductivity', weight: 1.25 },
      { token: 'vortex', weight: 0.875 },
    ],
    children: [],
  },
  '1_0': {
    path_id: '1_0',
    depth: 2,
    size: 2,
    local_rank: 1,
    stop_reason: 'min_size',
    top_tokens: [{ token: 'friction', weight: 0.5 }],
    children: [],
  },
};

export const docsFixture: DocRecord[] = [
  {
    id: 'd1',
    title: 'Vortex lattices',
    abstract: 'a',
    attributes: { material: ['nbse2'], country: ['usa'] },
  },
  {
    id: 'd2',
    title: 'Pairing in layered crystals',
    abstract: 'b',
    attributes: { material: ['nbse2', 'mos2'], country: ['japan'] },
  },
  {
    id: 'd3',
    title: 'Critical fields',
    abstract: 'c',
    attributes: { material: ['mos2'], country: ['usa'] },
  },
  {
    id: 'd4',
    title: 'Tunneling spectra',
    abstract: 'd',
    attributes: { material: ['ws2'], country: ['uk'] },
  },
];

export const facetFixture: FacetResponse = {
  facet: 'material',
  values: [
    { value: 'nbse2', count: 19, percentage: 67.9 },
    { value: 'mos2', count: 2, percentage: 8.9 },
    { value: 'ws2', count: 2, percentage: 5.4 },
  ],
};

export const predictionsFixture: PredictionRow[] = [
  { topic: '0', material: 'nbse2', score: 0.9137, provenance: 1 },
  { topic: '1_0', material: 'mos2', score: 0.7421, provenance: 2 },
  { topic: '0', material: 'ws2', score: 0.2058, provenance: 0 },
];

export const evalFixture: EvalResponse = {
  report: {
    hit_at: { '1': 0.85, '3': 1.0 },
    ci95: { '1': [0.7, 1.0], '3': [1.0, 1.0] },
    per_fold: { '1': [1.0, 0.75, 0.8], '3': [1.0, 1.0, 1.0] },
    folds: 3,
  },
  separation: {
    positive_scores: [0.9, 0.85, 0.7, 0.66],
    negative_scores: [0.1, 0.2, 0.3, 0.05],
    positive_quartiles: [0.69, 0.775, 0.8625],
    negative_quartiles: [0.0875, 0.15, 0.225],
    positive_counts: [1, 2, 3],
    negative_counts: [1, 2, 3],
  },
  ranking: {
    rows: [
      ['nbse2', 'member', 0.813],
      ['mos2', 'member', 0.703],
      ['ws2', 'decoy', 0.206],
    ],
  },
};

function jsonResponse(data: unknown, status = 200): Response {
  return new Response(JSON.stringify(data), {
    status,
    headers: { 'content-type': 'application/json' },
  });
}

export interface MockOptions {
  evalMissing?: boolean;
  failEverything?: boolean;
  searchResult?: { nodes: { path_id: string; depth: number; size: number }[]; documents: DocRecord[] };
}

export interface RecordedCall {
  url: string;
  body?: unknown;
}

export function mockFetch(options: MockOptions = {}) {
  const calls: RecordedCall[] = [];
  const fetchFn = async (input: string, init?: RequestInit): Promise<Response> => {
    if (options.failEverything) throw new TypeError('network down');
    const url = input.toString();
    const call: RecordedCall = { url };
    if (init?.body) call.body = JSON.parse(init.body as string);
    calls.push(call);

    if (url.endsWith('/api/meta')) return jsonResponse(metaFixture);
    if (url.endsWith('/api/tree')) return jsonResponse(treeFixture);
    if (url.includes('/api/search')) {
      return jsonResponse(
        options.searchResult ?? {
          nodes: [{ path_id: '0', depth: 1, size: 4 }],
          documents: docsFixture.slice(0, 3),
        },
      );
    }
    const nodeMatch = url.match(/\/api\/node\/([^/?]+)$/);
    if (nodeMatch) {
      const id = decodeURIComponent(nodeMatch[1]);
      const detail = nodeFixture[id];
      return detail
        ? jsonResponse(detail)
        : jsonResponse({ error: 'not_found', detail: `unknown node ${id}` }, 404);
    }
    if (url.includes('/documents')) {
      return jsonResponse({
        total: docsFixture.length,
        offset: 0,
        limit: 20,
        documents: docsFixture,
      });
    }
    if (url.includes('/facets/')) return jsonResponse(facetFixture);
    if (url.includes('/api/predictions')) {
      return jsonResponse({ predictions: predictionsFixture });
    }
    if (url.endsWith('/api/eval')) {
      if (options.evalMissing) {
        return jsonResponse({ error: 'not_found', detail: 'no evaluation report' }, 404);
      }
      return jsonResponse(evalFixture);
    }
    return jsonResponse({ error: 'not_found', detail: url }, 404);
  };
  return { fetchFn, calls };
}
