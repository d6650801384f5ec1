// Typed client for the triage HTTP API. Every method maps one endpoint;
// non-2xx statuses become typed errors so callers can branch on conflict
// vs validation without string matching.

export type Label =
  | 'burn'
  | 'regular'
  | 'vanity-suspect'
  | 'unstructured'
  | 'other';

export interface AddressStatsView {
  first_apparition: number;
  last_apparition: number;
  tx_count: number;
  total_received: number;
  total_sent: number;
}

export interface HighlightSpan {
  start: number;
  end: number;
  kind: 'run' | 'word';
  text: string;
}

export interface TriageItem {
  address: string;
  scheme: string;
  score: number;
  round: number;
  stats: AddressStatsView;
  context_txids: string[];
  highlights: HighlightSpan[];
}

export interface SchemeBucket {
  predicted: number;
  confirmed: number;
  rejected: number;
  pending: number;
  new_tp: number;
}

export interface RoundReport {
  round: number;
  predicted: number;
  confirmed: number;
  rejected: number;
  pending: number;
  new_tp: number;
  by_scheme: Record<string, SchemeBucket>;
  seed: number;
}

export interface LabelRecord {
  address: string;
  label: Label;
  source: string;
  round: number;
  annotator: string;
  timestamp: number;
}

export interface QueueHead {
  item: TriageItem;
  pending: number;
}

export interface QueuePage {
  total: number;
  offset: number;
  items: TriageItem[];
}

export interface LabelAck {
  record: LabelRecord;
  pending: number;
}

export interface RoundsView {
  rounds: RoundReport[];
  converged: boolean;
  pending: number;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

export class ConflictError extends ApiError {
  constructor(message: string) {
    super(409, message);
    this.name = 'ConflictError';
  }
}

export class IllegalLabelError extends ApiError {
  constructor(message: string) {
    super(422, message);
    this.name = 'IllegalLabelError';
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function raise(res: Response): Promise<never> {
  let detail = res.statusText;
  try {
    const body = await res.json();
    if (body && typeof body.detail === 'string') detail = body.detail;
  } catch {
    // non-JSON error body, keep the status text
  }
  if (res.status === 409) throw new ConflictError(detail);
  if (res.status === 422) throw new IllegalLabelError(detail);
  throw new ApiError(res.status, detail);
}

export class TriageApi {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl: string, fetchFn?: FetchLike) {
    this.base = baseUrl.replace(/\/+$/, '');
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async get(path: string): Promise<Response> {
    const res = await this.fetchFn(`${this.base}${path}`);
    if (!res.ok && res.status !== 204) await raise(res);
    return res;
  }

  async nextItem(): Promise<QueueHead | null> {
    const res = await this.get('/v1/queue/next');
    if (res.status === 204) return null;
    return (await res.json()) as QueueHead;
  }

  async page(offset: number, limit: number): Promise<QueuePage> {
    const res = await this.get(`/v1/queue?offset=${offset}&limit=${limit}`);
    return (await res.json()) as QueuePage;
  }

  async submitLabel(
    address: string,
    label: Label,
    annotator: string,
  ): Promise<LabelAck> {
    const res = await this.fetchFn(`${this.base}/v1/labels`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ address, label, annotator }),
    });
    if (!res.ok) await raise(res);
    return (await res.json()) as LabelAck;
  }

  async rounds(): Promise<RoundsView> {
    const res = await this.get('/v1/rounds');
    return (await res.json()) as RoundsView;
  }

  async runRound(seed: number): Promise<{ report: RoundReport; pending: number }> {
    const res = await this.fetchFn(`${this.base}/v1/rounds/run`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ seed }),
    });
    if (!res.ok) await raise(res);
    return (await res.json()) as { report: RoundReport; pending: number };
  }
}
