// Star field: per-star brightness follows the reported luminosity. The
// mapping is monotone, dim at the idle value (0.1) and full at 1.0.

import type { StarSummary } from "./protocol.js";

export function luminosityToBrightness(luminosity: number): number {
  const l = Math.min(1, Math.max(0, luminosity));
  return 0.15 + 0.85 * l;
}

interface StarSprite {
  id: string;
  x: number;
  y: number;
  radius: number;
}

export class Starfield {
  private sprites: StarSprite[] = [];

  constructor(
    private readonly ctx: CanvasRenderingContext2D,
    private readonly width: number,
    private readonly height: number,
  ) {}

  layout(stars: StarSummary[]): void {
    // deterministic ring layout; stable across redraws
    this.sprites = stars.map((star, i) => {
      const angle = (2 * Math.PI * i) / Math.max(1, stars.length);
      return {
        id: star.id,
        x: this.width / 2 + Math.cos(angle) * this.width * 0.3,
        y: this.height / 2 + Math.sin(angle) * this.height * 0.3,
        radius: 6 + 2 * Math.min(4, star.modes),
      };
    });
  }

  draw(luminosity: Record<string, number>, selected: string | null): void {
    this.ctx.clearRect(0, 0, this.width, this.height);
    for (const sprite of this.sprites) {
      const brightness = luminosityToBrightness(luminosity[sprite.id] ?? 0.1);
      this.ctx.beginPath();
      this.ctx.arc(sprite.x, sprite.y, sprite.radius, 0, 2 * Math.PI);
      this.ctx.fillStyle = `rgba(235, 240, 255, ${brightness.toFixed(3)})`;
      this.ctx.fill();
      if (sprite.id === selected) {
        this.ctx.strokeStyle = "rgba(140, 190, 255, 0.9)";
        this.ctx.lineWidth = 2;
        this.ctx.beginPath();
        this.ctx.arc(sprite.x, sprite.y, sprite.radius + 4, 0, 2 * Math.PI);
        this.ctx.stroke();
      }
    }
  }

  hitTest(x: number, y: number): string | null {
    for (const sprite of this.sprites) {
      const dx = x - sprite.x;
      const dy = y - sprite.y;
      if (dx * dx + dy * dy <= (sprite.radius + 4) ** 2) return sprite.id;
    }
    return null;
  }
}
