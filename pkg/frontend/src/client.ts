// Session client: one websocket to the relay, presentation only. It
// never simulates — every rendered value originates in a server frame.
// The transport is injected so tests can run the same client over the
// `ws` package in Node.

import {
  ClientFrame,
  GameConfigWire,
  LevelSpec,
  QuestionnaireInstrument,
  Role,
  ServerFrame,
  SessionEndFrame,
  SessionStatusFrame,
  StateFrame,
  decodeServerFrame,
  encodeClientFrame,
} from "./protocol.js";

export interface WsLike {
  send(data: string): void;
  close(): void;
  addEventListener(type: "open", cb: () => void): void;
  addEventListener(type: "close", cb: () => void): void;
  addEventListener(type: "error", cb: (err: unknown) => void): void;
  addEventListener(type: "message", cb: (ev: { data: unknown }) => void): void;
}

export type SocketFactory = (url: string) => WsLike;

export interface SessionInfo {
  sessionId: string;
  level: LevelSpec;
  seed: number;
  config: GameConfigWire;
}

export interface AckResult {
  status: "ok" | "dropped";
  detail?: string;
}

interface Pending {
  resolve: (ack: AckResult) => void;
  reject: (err: Error) => void;
}

export class SessionClient {
  private ws: WsLike | null = null;
  private seq = 0;
  private pendingAcks = new Map<number, Pending>();
  private started: ((info: SessionInfo) => void) | null = null;
  private failed: ((err: Error) => void) | null = null;

  sessionId: string | null = null;
  level: LevelSpec | null = null;
  config: GameConfigWire | null = null;
  lastState: StateFrame | null = null;
  end: SessionEndFrame | null = null;
  closed = false;

  onState: (frame: StateFrame) => void = () => {};
  onStatus: (frame: SessionStatusFrame) => void = () => {};
  onEnd: (frame: SessionEndFrame) => void = () => {};
  onError: (code: string, message: string) => void = () => {};
  onClose: () => void = () => {};

  constructor(
    private url: string,
    private makeSocket: SocketFactory = (u) => new WebSocket(u) as unknown as WsLike,
  ) {}

  private connect(): Promise<WsLike> {
    return new Promise((resolve, reject) => {
      const ws = this.makeSocket(this.url);
      ws.addEventListener("open", () => resolve(ws));
      ws.addEventListener("error", (err) => reject(new Error(`connection failed: ${String(err)}`)));
      ws.addEventListener("close", () => {
        this.closed = true;
        for (const pending of this.pendingAcks.values()) {
          pending.reject(new Error("connection closed"));
        }
        this.pendingAcks.clear();
        this.onClose();
      });
      ws.addEventListener("message", (ev) => {
        const raw = typeof ev.data === "string" ? ev.data : String(ev.data);
        this.handle(decodeServerFrame(raw));
      });
    });
  }

  private handle(frame: ServerFrame): void {
    switch (frame.type) {
      case "session_start":
        this.sessionId = frame.session_id;
        this.level = frame.level;
        this.config = frame.config;
        this.started?.({
          sessionId: frame.session_id,
          level: frame.level,
          seed: frame.seed,
          config: frame.config,
        });
        this.started = null;
        break;
      case "joined":
        this.sessionId = frame.session_id;
        this.level = frame.level;
        this.config = frame.config;
        this.started?.({ sessionId: frame.session_id, level: frame.level, seed: -1, config: frame.config });
        this.started = null;
        break;
      case "state":
        this.lastState = frame;
        this.onState(frame);
        break;
      case "session_status":
        this.onStatus(frame);
        break;
      case "session_end":
        this.end = frame;
        this.onEnd(frame);
        break;
      case "ack": {
        const pending = this.pendingAcks.get(frame.of_seq);
        if (pending) {
          this.pendingAcks.delete(frame.of_seq);
          pending.resolve({ status: frame.status, detail: frame.detail });
        }
        break;
      }
      case "error":
        if (this.failed) {
          this.failed(new Error(`${frame.code}: ${frame.message}`));
          this.failed = null;
          this.started = null;
        }
        this.onError(frame.code, frame.message);
        break;
    }
  }

  private send(frame: ClientFrame): number {
    if (!this.ws) throw new Error("not connected");
    this.seq += 1;
    this.ws.send(encodeClientFrame(frame, this.seq));
    return this.seq;
  }

  private sendAcked(frame: ClientFrame): Promise<AckResult> {
    const seq = this.send(frame);
    return new Promise((resolve, reject) => {
      this.pendingAcks.set(seq, { resolve, reject });
    });
  }

  /** Open a fresh session as the player. */
  async openSession(
    level: LevelSpec,
    opts: { seed?: number; config?: Partial<GameConfigWire>; sessionId?: string } = {},
  ): Promise<SessionInfo> {
    this.ws = await this.connect();
    return new Promise((resolve, reject) => {
      this.started = resolve;
      this.failed = reject;
      this.send({
        type: "open_session",
        level,
        ...(opts.seed !== undefined ? { seed: opts.seed } : {}),
        ...(opts.config ? { config: opts.config } : {}),
        ...(opts.sessionId ? { session_id: opts.sessionId } : {}),
      });
    });
  }

  /** Join an existing session (observer or sensor, or the player slot). */
  async join(sessionId: string, role: Role): Promise<SessionInfo> {
    this.ws = await this.connect();
    return new Promise((resolve, reject) => {
      this.started = resolve;
      this.failed = reject;
      this.send({ type: "join", session_id: sessionId, role });
    });
  }

  /** A tap: flap on the next server tick. Resolves when applied. */
  tap(): Promise<AckResult> {
    if (!this.sessionId) throw new Error("no session");
    return this.sendAcked({
      type: "input",
      session_id: this.sessionId,
      tick: this.lastState?.tick ?? 0,
      flap: true,
    });
  }

  sendHr(bpm: number, tsMs: number): Promise<AckResult> {
    if (!this.sessionId) throw new Error("no session");
    return this.sendAcked({ type: "hr", session_id: this.sessionId, bpm, ts: tsMs });
  }

  submitQuestionnaire(
    instrument: QuestionnaireInstrument,
    items: unknown[],
  ): Promise<AckResult> {
    if (!this.sessionId) throw new Error("no session");
    return this.sendAcked({
      type: "questionnaire",
      session_id: this.sessionId,
      instrument,
      items,
    });
  }

  close(): void {
    this.ws?.close();
  }
}
