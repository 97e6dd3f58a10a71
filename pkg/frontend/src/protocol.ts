// Wire protocol v1: every websocket text message is one JSON object.
// Mirrors docs/wire-protocol.schema.json in the repository root.

export const PROTOCOL_VERSION = 1;

export type Role = "player" | "sensor" | "observer";

export interface LevelSpec {
  level_id: 1 | 2 | 3;
  show_score: boolean;
  hr_adaptive: boolean;
  target_score?: number | null;
}

export function levelSpec(levelId: 1 | 2 | 3, targetScore = 30): LevelSpec {
  if (levelId === 1) return { level_id: 1, show_score: false, hr_adaptive: false, target_score: null };
  if (levelId === 2) return { level_id: 2, show_score: true, hr_adaptive: true, target_score: null };
  return { level_id: 3, show_score: true, hr_adaptive: true, target_score: targetScore };
}

export interface Pillar {
  index: number;
  x: number;
  gap_center_y: number;
  gap_height: number;
  nominal_speed: number;
}

export interface GameConfigWire {
  world_width: number;
  world_height: number;
  bird_home_x: number;
  gravity: number;
  flap_impulse: number;
  pillar_width: number;
  initial_gap: number;
  gap_increment_fraction: number;
  initial_pillar_speed: number;
  speed_growth_factor: number;
  speed_cap: number;
  gap_cap: number;
  pushback_speed: number;
  pillar_spacing: number;
  tick_rate: number;
}

interface Base {
  v: typeof PROTOCOL_VERSION;
  seq: number;
  session_id?: string;
}

export type StateFrame = Base & {
  type: "state";
  session_id: string;
  tick: number;
  bird_x: number;
  bird_y: number;
  bird_vy: number;
  multiplier: number;
  phase: "ready" | "running" | "ended";
  pillars: Pillar[];
  score?: number;
  threshold?: number;
};

export type SessionStartFrame = Base & {
  type: "session_start";
  session_id: string;
  level: LevelSpec;
  seed: number;
  config_digest: string;
  config: GameConfigWire;
};

export type JoinedFrame = Base & {
  type: "joined";
  session_id: string;
  role: Role;
  level: LevelSpec;
  config: GameConfigWire;
};

export type AckFrame = Base & {
  type: "ack";
  of_seq: number;
  status: "ok" | "dropped";
  detail?: string;
};

export type ErrorFrame = Base & { type: "error"; code: string; message: string };

export type SessionStatusFrame = Base & {
  type: "session_status";
  session_id: string;
  phase: "collecting_baseline" | "ready" | "running" | "ended";
  baseline_collected?: number;
  baseline_needed?: number;
  threshold?: number;
};

export type SessionEndFrame = Base & {
  type: "session_end";
  session_id: string;
  reason: "success" | "out_left" | "out_top" | "out_bottom";
  duration_s: number;
  final_score: number;
};

export type ServerFrame =
  | StateFrame
  | SessionStartFrame
  | JoinedFrame
  | AckFrame
  | ErrorFrame
  | SessionStatusFrame
  | SessionEndFrame;

export type QuestionnaireInstrument = "panas" | "pxi";

export type ClientFrame =
  | { type: "open_session"; level: LevelSpec | number; seed?: number; config?: Partial<GameConfigWire>; session_id?: string; pivot?: number }
  | { type: "join"; session_id: string; role: Role }
  | { type: "hr"; session_id: string; bpm: number; ts: number }
  | { type: "input"; session_id: string; tick: number; flap: boolean }
  | { type: "questionnaire"; session_id: string; instrument: QuestionnaireInstrument; items: unknown[] };

export function decodeServerFrame(raw: string): ServerFrame {
  const frame = JSON.parse(raw) as ServerFrame & { v?: number };
  if (frame.v !== PROTOCOL_VERSION) throw new Error(`unsupported protocol version ${frame.v}`);
  if (typeof frame.type !== "string") throw new Error("frame has no type");
  return frame;
}

export function encodeClientFrame(frame: ClientFrame, seq: number): string {
  return JSON.stringify({ v: PROTOCOL_VERSION, seq, ...frame });
}
