// Typed client for the repository service. The UI only ever renders what
// these endpoints return; it computes no statistics and holds no legal
// wording of its own.

export interface VenueRef {
  kind: string;
  container_title: string;
  volume: string | null;
  issue: string | null;
  chapter: string | null;
  pages: string | null;
}

export interface EprintMetadata {
  title: string;
  creators: string[];
  year: number;
  venue: VenueRef;
  citation_line: string;
  vor_identifier: string | null;
}

export interface PublicEprintView {
  id: string;
  metadata: EprintMetadata;
  access_kind: "open" | "closed";
  requestable: boolean;
  attestation_text?: string;
  document_links?: string[];
}

export interface RequestAck {
  request_id: string;
  message: string;
}

export interface RespondOutcome {
  state: string;
  delivered: boolean;
  title: string;
  message: string;
}

export interface ResponseStats {
  period_start: string;
  period_end: string;
  ignore_window_days: number;
  total: number;
  approved: number;
  unanswered: number;
  rejected: number;
  fresh_pending: number;
  rendered_rows: Record<string, string>;
  rendered_table: string;
}

export interface AccessStats {
  total: number;
  closed: number;
  closed_share_display: string;
  rendered_table: string;
}

export interface Alert {
  kind: string;
  eprint_id: string;
  requester_address: string | null;
  evidence: string[];
  window_days: number;
  message: string;
}

export interface ServiceConfig {
  repo_name: string;
  base_url: string;
  jurisdiction: string;
}

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(detail);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async call<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    const body = await response.json().catch(() => ({}));
    if (!response.ok) {
      throw new ApiError(response.status, body.detail ?? response.statusText);
    }
    return body as T;
  }

  getConfig(): Promise<ServiceConfig> {
    return this.call("/config");
  }

  getEprint(id: string): Promise<PublicEprintView> {
    return this.call(`/eprints/${encodeURIComponent(id)}`);
  }

  submitRequest(
    id: string,
    body: { email: string; purpose: string; purpose_text?: string; attested: boolean },
  ): Promise<RequestAck> {
    return this.call(`/eprints/${encodeURIComponent(id)}/request`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  respond(token: string, action: string): Promise<RespondOutcome> {
    const query = new URLSearchParams({ token, action });
    return this.call(`/respond?${query}`);
  }

  private adminHeaders(secret: string): Record<string, string> {
    return { "X-Admin-Secret": secret };
  }

  adminResponseStats(secret: string, from?: string, to?: string): Promise<ResponseStats> {
    const query = new URLSearchParams();
    if (from) query.set("from", from);
    if (to) query.set("to", to);
    const suffix = query.size > 0 ? `?${query}` : "";
    return this.call(`/admin/stats/responses${suffix}`, {
      headers: this.adminHeaders(secret),
    });
  }

  adminAccessStats(secret: string): Promise<AccessStats> {
    return this.call("/admin/stats/access", { headers: this.adminHeaders(secret) });
  }

  adminAlerts(secret: string): Promise<{ alerts: Alert[] }> {
    return this.call("/admin/alerts", { headers: this.adminHeaders(secret) });
  }
}
