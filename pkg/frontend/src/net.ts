/** Thin WebSocket wrapper: connect, hello, deliver parsed frames. */

import { helloMessage, parseServerMessage, type ServerMessage } from "./protocol.js";

export interface NetHandlers {
  onMessage(msg: ServerMessage): void;
  onProtocolError(raw: string): void;
  onStatus(status: "connecting" | "open" | "closed"): void;
}

export class SyncConnection {
  private ws: WebSocket | null = null;

  constructor(private url: string, private clientId: string,
              private handlers: NetHandlers) {}

  connect(): void {
    this.handlers.onStatus("connecting");
    this.ws = new WebSocket(this.url);
    this.ws.onopen = () => {
      this.handlers.onStatus("open");
      this.ws?.send(helloMessage(this.clientId));
    };
    this.ws.onclose = () => {
      this.handlers.onStatus("closed");
      this.ws = null;
    };
    this.ws.onmessage = (ev) => {
      const msg = parseServerMessage(String(ev.data));
      if (msg === null) {
        this.handlers.onProtocolError(String(ev.data));
      } else {
        this.handlers.onMessage(msg);
      }
    };
  }

  send(frame: string): boolean {
    if (this.ws === null || this.ws.readyState !== WebSocket.OPEN) return false;
    this.ws.send(frame);
    return true;
  }
}
