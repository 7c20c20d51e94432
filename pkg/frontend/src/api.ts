// Typed client for the read-only explorer API. Every number the UI
// displays comes straight out of these response payloads.

export interface NodeSummary {
  path_id: string;
  depth: number;
  size: number;
  stop_reason: string;
  children: NodeSummary[];
}

export interface TreeResponse {
  root: NodeSummary;
  total_topics: number;
}

export interface TokenWeight {
  token: string;
  weight: number;
}

export interface NodeDetail {
  path_id: string;
  depth: number;
  size: number;
  local_rank: number;
  stop_reason: string;
  top_tokens: TokenWeight[];
  children: string[];
}

export interface DocRecord {
  id: string;
  title: string;
  abstract: string;
  attributes: Record<string, string[]>;
}

export interface DocumentsPage {
  total: number;
  offset: number;
  limit: number;
  documents: DocRecord[];
}

export interface FacetValue {
  value: string;
  count: number;
  percentage: number;
}

export interface FacetResponse {
  facet: string;
  values: FacetValue[];
}

export interface SearchRequest {
  tokens: string[];
  mode: 'keywords' | 'denovo';
  logic: 'and' | 'or';
  top_n: number | null;
  facet_filters: Record<string, string[]>;
  selected_clusters: string[];
}

export interface SearchResponse {
  nodes: { path_id: string; depth: number; size: number }[];
  documents: DocRecord[];
}

export interface PredictionRow {
  topic: string;
  material: string;
  score: number;
  provenance: number;
}

export interface MetaResponse {
  n_documents: number;
  n_topics: number;
  facets: string[];
  materials: string[];
  has_predictions: boolean;
  has_eval: boolean;
}

export interface EvalReportPayload {
  hit_at: Record<string, number>;
  ci95: Record<string, [number, number]>;
  per_fold: Record<string, number[]>;
  folds: number;
}

export interface SeparationPayload {
  positive_scores: number[];
  negative_scores: number[];
  positive_quartiles: [number, number, number];
  negative_quartiles: [number, number, number];
  positive_counts: [number, number, number];
  negative_counts: [number, number, number];
}

export interface RankingPayload {
  rows: [string, string, number][];
}

export interface EvalResponse {
  report?: EvalReportPayload;
  separation?: SeparationPayload;
  ranking?: RankingPayload;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private baseUrl: string = '',
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let resp: Response;
    try {
      resp = await this.fetchFn(this.baseUrl + path, init);
    } catch (err) {
      if ((err as Error).name === 'AbortError') throw err;
      throw new ApiError(0, `service unreachable: ${(err as Error).message}`);
    }
    if (!resp.ok) {
      let detail = resp.statusText;
      try {
        const body = await resp.json();
        if (body && body.detail) detail = body.detail;
      } catch {
        // keep the status text
      }
      throw new ApiError(resp.status, detail);
    }
    return resp.json() as Promise<T>;
  }

  meta(): Promise<MetaResponse> {
    return this.request('/api/meta');
  }

  tree(): Promise<TreeResponse> {
    return this.request('/api/tree');
  }

  node(pathId: string): Promise<NodeDetail> {
    return this.request(`/api/node/${encodeURIComponent(pathId)}`);
  }

  documents(pathId: string, offset = 0, limit = 20): Promise<DocumentsPage> {
    return this.request(
      `/api/node/${encodeURIComponent(pathId)}/documents?offset=${offset}&limit=${limit}`,
    );
  }

  facets(pathId: string, facet: string): Promise<FacetResponse> {
    return this.request(
      `/api/node/${encodeURIComponent(pathId)}/facets/${encodeURIComponent(facet)}`,
    );
  }

  search(req: SearchRequest, signal?: AbortSignal): Promise<SearchResponse> {
    return this.request('/api/search', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(req),
      signal,
    });
  }

  predictions(top = 50): Promise<{ predictions: PredictionRow[] }> {
    return this.request(`/api/predictions?top=${top}`);
  }

  evalReport(): Promise<EvalResponse> {
    return this.request('/api/eval');
  }
}
