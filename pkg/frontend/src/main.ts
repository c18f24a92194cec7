import { KeyTracker } from "./input.js";
import { NetClient } from "./net.js";
import { Ctx2D, renderView } from "./render.js";
import { ClientState } from "./state.js";

const CELL_PX = 10;

function wsUrl(): string {
  const params = new URLSearchParams(window.location.search);
  const server = params.get("server") ?? "ws://localhost:8000";
  const session = params.get("session") ?? "s0000";
  return `${server.replace(/^http/, "ws")}/ws/${session}`;
}

function setup(): void {
  const canvas = document.getElementById("game") as HTMLCanvasElement;
  const status = document.getElementById("status") as HTMLElement;
  const joinForm = document.getElementById("join-form") as HTMLFormElement;
  const nameInput = document.getElementById("name") as HTMLInputElement;

  const state = new ClientState();
  const net = new NetClient();
  const keys = new KeyTracker();

  net.connect(wsUrl(), {
    onOpen: () => {
      state.connection = "open";
      status.textContent = "connected; enter a name to join";
    },
    onClose: () => {
      state.connection = "closed";
      status.textContent = "disconnected";
    },
    onMessage: (msg) => {
      state.apply(msg);
      if (msg.type === "joined") {
        status.textContent = `joined as ${msg.id} (${msg.icon}); waiting for start`;
        joinForm.style.display = "none";
      } else if (msg.type === "game_start") {
        canvas.width = msg.world.width * CELL_PX;
        canvas.height = msg.world.height * CELL_PX + 24;
        keys.reset();
        status.textContent = "";
      } else if (msg.type === "game_over") {
        const mine = msg.scores.find((s) => s.id === state.id);
        status.textContent = msg.aborted
          ? "game aborted"
          : `game over, your score: ${mine ? mine.score : 0}`;
      } else if (msg.type === "error") {
        status.textContent = `server: ${msg.message}`;
      }
    },
  });

  joinForm.addEventListener("submit", (ev) => {
    ev.preventDefault();
    net.join(nameInput.value.trim() || "anonymous");
  });

  document.addEventListener("keydown", (ev) => {
    const frame = keys.keydown(ev.key, ev.repeat);
    if (frame) {
      net.send(frame);
      ev.preventDefault();
    }
  });
  document.addEventListener("keyup", (ev) => {
    const frame = keys.keyup(ev.key);
    if (frame) {
      net.send(frame);
      ev.preventDefault();
    }
  });

  const ctx = canvas.getContext("2d") as unknown as Ctx2D;
  const frame = () => {
    renderView(ctx, state.view, state.world, {
      score: state.score,
      countdown: state.countdown,
      status: state.running ? "" : "waiting",
    }, CELL_PX);
    window.requestAnimationFrame(frame);
  };
  canvas.width = state.world.width * CELL_PX;
  canvas.height = state.world.height * CELL_PX + 24;
  window.requestAnimationFrame(frame);
}

setup();
