// Wire types for the experiment-server WebSocket protocol.
// One JSON object per text frame, discriminated by "type".

export type Dir = "up" | "down" | "left" | "right";

export interface WireForager {
  id: string;
  icon: string;
  x: number;
  y: number;
  color: string;
}

export interface JoinedMessage {
  type: "joined";
  id: string;
  icon: string;
}

export interface LobbyMessage {
  type: "lobby";
  players: { id: string; name: string; icon: string }[];
}

export interface GameStartMessage {
  type: "game_start";
  game_index: number;
  game_seconds: number;
  tick_seconds: number;
  world: { width: number; height: number };
  condition: {
    food_visible: boolean;
    foragers_visible: boolean;
    success_indicated: boolean;
  };
}

export interface ViewMessage {
  type: "view";
  t: number;
  self: WireForager;
  food: [number, number, number][];
  markers: [number, number][];
  foragers: WireForager[];
  score: number;
}

export interface GameOverMessage {
  type: "game_over";
  scores: { id: string; name?: string; icon: string; score: number }[];
  aborted?: boolean;
}

export interface ErrorMessage {
  type: "error";
  message: string;
}

export type ServerMessage =
  | JoinedMessage
  | LobbyMessage
  | GameStartMessage
  | ViewMessage
  | GameOverMessage
  | ErrorMessage;

export interface InputFrame {
  type: "input";
  dir: Dir | null;
}

export function parseServerMessage(text: string): ServerMessage | null {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof raw !== "object" || raw === null) return null;
  const type = (raw as { type?: unknown }).type;
  if (
    type === "joined" ||
    type === "lobby" ||
    type === "game_start" ||
    type === "view" ||
    type === "game_over" ||
    type === "error"
  ) {
    return raw as ServerMessage;
  }
  return null; // unknown frames are ignored, not fatal
}
