import { InputFrame, ServerMessage, parseServerMessage } from "./protocol.js";

export interface NetHandlers {
  onMessage(msg: ServerMessage): void;
  onOpen?(): void;
  onClose?(): void;
}

export class NetClient {
  private ws: WebSocket | null = null;

  connect(url: string, handlers: NetHandlers): void {
    this.ws = new WebSocket(url);
    this.ws.onopen = () => handlers.onOpen?.();
    this.ws.onclose = () => handlers.onClose?.();
    this.ws.onmessage = (ev) => {
      const msg = parseServerMessage(String(ev.data));
      if (msg) handlers.onMessage(msg);
    };
  }

  send(payload: InputFrame | Record<string, unknown>): void {
    if (this.ws && this.ws.readyState === WebSocket.OPEN) {
      this.ws.send(JSON.stringify(payload));
    }
  }

  join(name: string): void {
    this.send({ type: "join", name });
  }
}
