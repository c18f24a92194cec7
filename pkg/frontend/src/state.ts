import { GameOverMessage, ServerMessage, ViewMessage } from "./protocol.js";

// Everything the renderer is allowed to read. The latest server view is the
// whole world model: nothing hidden by the server is ever reconstructed here.
export class ClientState {
  connection: "connecting" | "open" | "closed" = "connecting";
  id: string | null = null;
  icon: string | null = null;
  world = { width: 60, height: 60 };
  gameSeconds = 0;
  running = false;
  view: ViewMessage | null = null;
  lastGameOver: GameOverMessage | null = null;
  lastError: string | null = null;
  players: { id: string; name: string; icon: string }[] = [];

  get score(): number {
    return this.view ? this.view.score : 0;
  }

  get countdown(): number {
    if (!this.running || !this.view) return this.gameSeconds;
    return Math.max(0, this.gameSeconds - this.view.t);
  }

  apply(msg: ServerMessage): void {
    switch (msg.type) {
      case "joined":
        this.id = msg.id;
        this.icon = msg.icon;
        break;
      case "lobby":
        this.players = msg.players;
        break;
      case "game_start":
        this.world = msg.world;
        this.gameSeconds = msg.game_seconds;
        this.running = true;
        this.view = null;
        this.lastGameOver = null;
        break;
      case "view":
        this.view = msg;
        break;
      case "game_over":
        this.running = false;
        this.lastGameOver = msg;
        break;
      case "error":
        this.lastError = msg.message;
        break;
    }
  }
}
