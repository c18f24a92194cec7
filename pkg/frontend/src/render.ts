import { ViewMessage, WireForager } from "./protocol.js";

// The slice of CanvasRenderingContext2D the renderer needs; tests substitute
// a recording fake.
export interface Ctx2D {
  fillStyle: string;
  strokeStyle: string;
  lineWidth: number;
  font: string;
  textAlign: string;
  textBaseline: string;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  clearRect(x: number, y: number, w: number, h: number): void;
  fillText(text: string, x: number, y: number): void;
  beginPath(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  fill(): void;
  stroke(): void;
}

export const FOOD_COLOR = "#2e8b2e"; // green squares
export const MARKER_COLOR = "#8be28b"; // hollow outline, own markers only
export const GRID_COLOR = "#222222";
export const HUD_COLOR = "#f0f0f0";
export const SELF_RING_COLOR = "#ffffff";

const FORAGER_COLORS: Record<string, string> = {
  purple: "#9b59d0",
  blue: "#3b7dd8",
  yellow: "#e6c229",
  orange: "#e67e22",
  red: "#d64545",
};

const ICON_GLYPHS: Record<string, string> = {
  heart: "♥",
  butterfly: "✿",
  dog: "d",
  airplane: "✈",
  arrow: "➤",
  box: "■",
  bug: "٭",
  car: "c",
  cow: "w",
  "face-happy": "☺",
  fish: "f",
  flag: "⚑",
  flower: "❀",
  house: "h",
  leaf: "☘",
  person: "♟",
  plant: "p",
  sheep: "s",
  star: "★",
  target: "◎",
  tree: "t",
  truck: "T",
  turtle: "u",
  wheel: "☸",
};

export interface HudInfo {
  score: number;
  countdown: number;
  status: string;
}

function glyphFor(icon: string): string {
  return ICON_GLYPHS[icon] ?? icon.charAt(0);
}

export function colorFor(forager: WireForager): string {
  return FORAGER_COLORS[forager.color] ?? FORAGER_COLORS.purple;
}

/**
 * Draw exactly the entities present in the server view: food as green
 * squares, own markers as hollow outlines, foragers as colored disks with
 * their icon glyph, plus the score/countdown HUD. The grid's y axis points
 * up in world coordinates, so rows are flipped for the screen.
 */
export function renderView(
  ctx: Ctx2D,
  view: ViewMessage | null,
  world: { width: number; height: number },
  hud: HudInfo,
  cellPx: number,
): void {
  const w = world.width * cellPx;
  const h = world.height * cellPx;
  ctx.clearRect(0, 0, w, h + 24);
  ctx.fillStyle = GRID_COLOR;
  ctx.fillRect(0, 0, w, h);

  const sx = (x: number) => x * cellPx;
  const sy = (y: number) => (world.height - 1 - y) * cellPx;

  if (view) {
    ctx.fillStyle = FOOD_COLOR;
    for (const [x, y] of view.food) {
      ctx.fillRect(sx(x), sy(y), cellPx, cellPx);
    }

    ctx.strokeStyle = MARKER_COLOR;
    ctx.lineWidth = 2;
    for (const [x, y] of view.markers) {
      ctx.strokeRect(sx(x) + 1, sy(y) + 1, cellPx - 2, cellPx - 2);
    }

    for (const f of view.foragers) {
      const cx = sx(f.x) + cellPx / 2;
      const cy = sy(f.y) + cellPx / 2;
      ctx.fillStyle = colorFor(f);
      ctx.beginPath();
      ctx.arc(cx, cy, cellPx * 0.45, 0, Math.PI * 2);
      ctx.fill();
      if (f.id === view.self.id) {
        ctx.strokeStyle = SELF_RING_COLOR;
        ctx.lineWidth = 2;
        ctx.beginPath();
        ctx.arc(cx, cy, cellPx * 0.55, 0, Math.PI * 2);
        ctx.stroke();
      }
      ctx.fillStyle = "#ffffff";
      ctx.font = `${Math.floor(cellPx * 0.7)}px sans-serif`;
      ctx.textAlign = "center";
      ctx.textBaseline = "middle";
      ctx.fillText(glyphFor(f.icon), cx, cy);
    }
  }

  ctx.fillStyle = HUD_COLOR;
  ctx.font = "14px sans-serif";
  ctx.textAlign = "left";
  ctx.textBaseline = "top";
  const seconds = Math.ceil(hud.countdown);
  ctx.fillText(
    `score ${hud.score}    time ${seconds}s    ${hud.status}`,
    4,
    h + 4,
  );
}
