import { swatch } from './colors.js';

export interface SceneOptions {
  tile: number;       // half-width of a cell diamond, in px
  maxY: number;       // hide cells above this layer (visibility slider)
  originX: number;
  originY: number;
}

export interface SceneCell {
  key: string;
  depth: number;
  top: string;   // svg polygon points
  left: string;
  right: string;
  topFill: string;
  leftFill: string;
  rightFill: string;
}

export const DEFAULT_OPTIONS: SceneOptions = {
  tile: 16,
  maxY: 99,
  originX: 260,
  originY: 300,
};

export function project(x: number, y: number, z: number, opts: SceneOptions) {
  const sx = opts.originX + (x - z) * opts.tile;
  const sy = opts.originY + (x + z) * (opts.tile / 2) - y * opts.tile;
  return { sx, sy };
}

function points(coords: Array<[number, number]>): string {
  return coords.map(([a, b]) => `${a},${b}`).join(' ');
}

/**
 * Orthographic isometric scene graph: a pure function of the block map and
 * options. Cells are emitted back-to-front so painting in order is correct.
 */
export function buildScene(
  blocks: ReadonlyMap<string, string>,
  opts: SceneOptions = DEFAULT_OPTIONS,
): SceneCell[] {
  const cells: Array<{ x: number; y: number; z: number; color: string }> = [];
  for (const [key, color] of blocks) {
    const parts = key.split(',').map(Number);
    const [x, y, z] = [parts[0] ?? 0, parts[1] ?? 0, parts[2] ?? 0];
    if (y <= opts.maxY) {
      cells.push({ x, y, z, color });
    }
  }
  cells.sort((a, b) => a.x + a.z - (b.x + b.z) || a.y - b.y || a.x - b.x);

  const t = opts.tile;
  const h = t; // cube visual height equals the tile half-width
  return cells.map((cell) => {
    const { sx, sy } = project(cell.x, cell.y, cell.z, opts);
    const colors = swatch(cell.color);
    return {
      key: `${cell.x},${cell.y},${cell.z}`,
      depth: cell.x + cell.z + cell.y / 100,
      top: points([
        [sx, sy - h],
        [sx + t, sy - h + t / 2],
        [sx, sy - h + t],
        [sx - t, sy - h + t / 2],
      ]),
      left: points([
        [sx - t, sy - h + t / 2],
        [sx, sy - h + t],
        [sx, sy + t],
        [sx - t, sy + t / 2],
      ]),
      right: points([
        [sx, sy - h + t],
        [sx + t, sy - h + t / 2],
        [sx + t, sy + t / 2],
        [sx, sy + t],
      ]),
      topFill: colors.top,
      leftFill: colors.left,
      rightFill: colors.right,
    };
  });
}

/** Ground-grid outline for the build region, drawn beneath the blocks. */
export function floorOutline(width: number, depth: number,
                             opts: SceneOptions = DEFAULT_OPTIONS): string[] {
  const lines: string[] = [];
  for (let x = 0; x <= width; x++) {
    const a = project(x - 0.5, 0, -0.5, opts);
    const b = project(x - 0.5, 0, depth - 0.5, opts);
    lines.push(points([[a.sx, a.sy + opts.tile / 2], [b.sx, b.sy + opts.tile / 2]]));
  }
  for (let z = 0; z <= depth; z++) {
    const a = project(-0.5, 0, z - 0.5, opts);
    const b = project(width - 0.5, 0, z - 0.5, opts);
    lines.push(points([[a.sx, a.sy + opts.tile / 2], [b.sx, b.sy + opts.tile / 2]]));
  }
  return lines;
}
