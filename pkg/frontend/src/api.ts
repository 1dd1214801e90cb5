// Typed client for the screening service. All mutations go through the
// documented endpoints; fetch is injectable so tests can run against an
// in-memory stub.

import type {
  ErrorBody,
  EvalRunJson,
  EvalRunSummaryJson,
  FragmentJson,
  LabelingPage,
  Sentiment,
  TriageItemJson,
  TriageStatus,
} from './types.js';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface ApiConfig {
  baseUrl: string;
  token?: string;
  fetchFn?: FetchLike;
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly body: ErrorBody | null,
  ) {
    super(body ? `${body.code}: ${body.message}` : `HTTP ${status}`);
  }
}

export class ApiClient {
  private readonly baseUrl: string;
  private readonly token?: string;
  private readonly fetchFn: FetchLike;

  constructor(config: ApiConfig) {
    this.baseUrl = config.baseUrl.replace(/\/$/, '');
    this.token = config.token;
    this.fetchFn = config.fetchFn ?? ((url, init) => fetch(url, init));
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = {};
    if (body !== undefined) headers['Content-Type'] = 'application/json';
    if (this.token) headers['Authorization'] = `Bearer ${this.token}`;
    const response = await this.fetchFn(this.baseUrl + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let parsed: ErrorBody | null = null;
      try {
        parsed = (await response.json()) as ErrorBody;
      } catch {
        parsed = null;
      }
      throw new ApiError(response.status, parsed);
    }
    return (await response.json()) as T;
  }

  health(): Promise<{ status: string }> {
    return this.request('GET', '/health');
  }

  labelingQueue(cursor?: string | null, pageSize = 20): Promise<LabelingPage> {
    const params = new URLSearchParams({ page_size: String(pageSize) });
    // The cursor is opaque server state: pass it back exactly as received.
    if (cursor) params.set('cursor', cursor);
    return this.request('GET', `/queue/labeling?${params.toString()}`);
  }

  submitLabel(fragmentId: string, label: Sentiment, annotator: string): Promise<FragmentJson> {
    return this.request('POST', '/labels', {
      fragment_id: fragmentId,
      label,
      annotator,
    });
  }

  fragment(fragmentId: string): Promise<FragmentJson> {
    return this.request('GET', `/fragments/${encodeURIComponent(fragmentId)}`);
  }

  triageQueue(status: TriageStatus | 'all' = 'pending'): Promise<{ items: TriageItemJson[] }> {
    return this.request('GET', `/queue/triage?status=${status}`);
  }

  decideTriage(
    itemId: string,
    decision: 'escalate' | 'dismiss',
    analyst: string,
  ): Promise<TriageItemJson> {
    return this.request('POST', `/triage/${encodeURIComponent(itemId)}/decision`, {
      decision,
      analyst,
    });
  }

  evalRun(runId: string): Promise<EvalRunJson> {
    return this.request('GET', `/eval-runs/${encodeURIComponent(runId)}`);
  }

  listEvalRuns(): Promise<{ items: EvalRunSummaryJson[] }> {
    return this.request('GET', '/eval-runs');
  }

  createEvalRun(body: {
    dataset_id?: string;
    classifier?: Record<string, unknown>;
    fraction?: number;
    seed: number;
  }): Promise<EvalRunJson> {
    return this.request('POST', '/eval-runs', body);
  }

  postDocuments(
    documents: { raw_text: string; source?: string; origin_ref?: string; title?: string }[],
  ): Promise<{ documents: number; fragments: number; skipped: number; document_ids: string[] }> {
    return this.request('POST', '/documents', { documents });
  }

  screenTexts(texts: string[]): Promise<{
    screen_id: string;
    items: {
      fragment_id: string;
      text: string;
      prediction: { label: Sentiment } | null;
      error: string | null;
      flagged: boolean;
    }[];
    enqueued: TriageItemJson[];
  }> {
    return this.request('POST', '/screen', { texts });
  }

  annotationGuide(): Promise<{ title: string; body: string }> {
    return this.request('GET', '/annotation-guide');
  }
}
