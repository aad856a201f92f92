/** Message types and the client for the versioned prover session protocol. */

export const PROTOCOL_VERSION = 1;

export interface HypView {
  label: string;
  ann: string; // "", "*", or "@"
  formula: string;
}

export interface SubgoalView {
  tyvars: string[];
  eigenvars: { name: string; ty: string }[];
  hyps: HypView[];
  goal: string;
}

export interface Response {
  v: number;
  id: number | null;
  status: "ok" | "error";
  proof?: string | null;
  completed?: boolean;
  proof_completed?: string;
  subgoals?: SubgoalView[];
  theorems?: string[];
  open?: string | null;
  code?: string;
  diagnostic?: string;
}

export type Command = "load" | "tactic" | "undo" | "state" | "theorems" | "check";

/** Minimal transport abstraction so tests can inject a fake server. */
export interface Transport {
  open(): Promise<string>;
  send(sid: string, body: unknown): Promise<Response>;
}

export class HttpTransport implements Transport {
  constructor(private baseUrl: string) {}

  async open(): Promise<string> {
    const r = await fetch(`${this.baseUrl}/api/session`, { method: "POST" });
    if (!r.ok) throw new Error(`session open failed: ${r.status}`);
    const data = await r.json();
    return data.session as string;
  }

  async send(sid: string, body: unknown): Promise<Response> {
    const r = await fetch(`${this.baseUrl}/api/session/${sid}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!r.ok) throw new Error(`request failed: ${r.status}`);
    return (await r.json()) as Response;
  }
}

/**
 * One live prover session.  Requests are strictly sequential: a second
 * request while one is pending is rejected so the server stays the single
 * source of truth for ordering.
 */
export class ProverClient {
  private sid: string | null = null;
  private nextId = 1;
  private inFlight = false;

  constructor(private transport: Transport) {}

  get pending(): boolean {
    return this.inFlight;
  }

  get connected(): boolean {
    return this.sid !== null;
  }

  get sessionId(): string | null {
    return this.sid;
  }

  async connect(): Promise<void> {
    this.sid = await this.transport.open();
  }

  /** Reconnect after a connection loss: fresh session, caller replays. */
  async reconnect(): Promise<void> {
    this.sid = null;
    await this.connect();
  }

  async request(cmd: Command, payload?: Record<string, unknown>): Promise<Response> {
    if (this.sid === null) throw new Error("not connected");
    if (this.inFlight) throw new Error("a request is already pending");
    this.inFlight = true;
    try {
      const id = this.nextId++;
      const resp = await this.transport.send(this.sid, {
        v: PROTOCOL_VERSION,
        id,
        cmd,
        payload: payload ?? {},
      });
      if (resp.id !== id && resp.id !== null) {
        throw new Error(`response id ${resp.id} does not echo request id ${id}`);
      }
      return resp;
    } finally {
      this.inFlight = false;
    }
  }

  load(text: string): Promise<Response> {
    return this.request("load", { text });
  }

  tactic(text: string): Promise<Response> {
    return this.request("tactic", { text });
  }

  undo(): Promise<Response> {
    return this.request("undo");
  }

  state(): Promise<Response> {
    return this.request("state");
  }

  theorems(): Promise<Response> {
    return this.request("theorems");
  }
}
