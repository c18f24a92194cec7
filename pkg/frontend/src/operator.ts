// Minimal operator panel: create a session, watch its state, start each
// scheduled game, abort, and download logs.

interface SessionStatus {
  session_id: string;
  state: string;
  game_index: number;
  n_games: number;
  roster: { id: string; name: string; icon: string; connected: boolean }[];
  schedule: { condition: Record<string, boolean>; switch_time: number }[];
}

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el;
}

function httpBase(): string {
  const params = new URLSearchParams(window.location.search);
  return params.get("server") ?? "http://localhost:8000";
}

let sessionId: string | null = null;
let ws: WebSocket | null = null;

function condLabel(c: Record<string, boolean>): string {
  return [
    c.food_visible ? "food" : "no-food",
    c.foragers_visible ? "foragers" : "no-foragers",
    c.success_indicated ? "success" : "no-success",
  ].join(" / ");
}

async function refresh(): Promise<void> {
  if (!sessionId) return;
  const res = await fetch(`${httpBase()}/api/sessions/${sessionId}`);
  if (!res.ok) return;
  const status = (await res.json()) as SessionStatus;
  $("session-state").textContent =
    `${status.session_id}: ${status.state}, game ${status.game_index + 1}` +
    ` of ${status.n_games}`;
  $("roster").innerHTML = status.roster
    .map((p) => `<li>${p.name} (${p.icon})${p.connected ? "" : " [gone]"}</li>`)
    .join("");
  $("schedule").innerHTML = status.schedule
    .map((g, i) =>
      `<li>${i === status.game_index ? "&#9654; " : ""}` +
      `${condLabel(g.condition)}, switch at ${g.switch_time}s</li>`)
    .join("");
  const logsRes = await fetch(`${httpBase()}/api/sessions/${sessionId}/logs`);
  if (logsRes.ok) {
    const logs = (await logsRes.json()) as { completed: string[]; partial: string[] };
    $("logs").innerHTML = logs.completed
      .concat(logs.partial.map((n) => `${n} (partial)`))
      .map((n) => {
        const name = n.replace(" (partial)", "");
        return `<li><a href="${httpBase()}/api/sessions/${sessionId}/logs/${name}"` +
          ` download>${n}</a></li>`;
      })
      .join("");
  }
}

async function createSession(): Promise<void> {
  const res = await fetch(`${httpBase()}/api/sessions`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: "{}",
  });
  const status = (await res.json()) as SessionStatus;
  sessionId = status.session_id;
  const wsBase = httpBase().replace(/^http/, "ws");
  ws = new WebSocket(`${wsBase}/ws/${sessionId}`);
  ws.onmessage = () => void refresh();
  $("join-hint").textContent =
    `participants join with ?session=${sessionId}`;
  await refresh();
}

function send(type: "start_game" | "abort"): void {
  if (ws && ws.readyState === WebSocket.OPEN) {
    ws.send(JSON.stringify({ type }));
    window.setTimeout(() => void refresh(), 300);
  }
}

function setup(): void {
  $("create").addEventListener("click", () => void createSession());
  $("start").addEventListener("click", () => send("start_game"));
  $("abort").addEventListener("click", () => send("abort"));
  window.setInterval(() => void refresh(), 2000);
}

setup();
