/**
 * Figure object model. Plots are assembled as typed layers in world
 * coordinates (meters) and only rasterized at the very end, so tests can
 * assert structure (layer roles, counts, legend, aspect) without reading
 * pixels.
 */

export interface Color {
  r: number;
  g: number;
  b: number;
  a: number;
}

export type Vec2 = [number, number];

export type LayerRole =
  | "trajectory"
  | "gt-trajectory"
  | "contour"
  | "centroid"
  | "measurements"
  | "background-points"
  | "target-points";

export interface PolylineLayer {
  kind: "polyline";
  role: LayerRole;
  points: Vec2[];
  color: Color;
  width: number;
  dashed?: boolean;
  closed?: boolean;
  label?: string;
}

export interface ScatterLayer {
  kind: "scatter";
  role: LayerRole;
  points: Vec2[];
  color: Color;
  size: number;
  label?: string;
}

export type Layer = PolylineLayer | ScatterLayer;

export interface Figure {
  layers: Layer[];
  /** always true: geometry is drawn in meters with a common scale per axis */
  equalAspect: boolean;
  units: "m";
  legend: string[];
}

export const GRAY: Color = { r: 158, g: 158, b: 158, a: 255 };
export const BLUE: Color = { r: 31, g: 119, b: 180, a: 255 };
export const LIGHT_BLUE: Color = { r: 100, g: 181, b: 246, a: 255 };
export const GREEN: Color = { r: 44, g: 160, b: 44, a: 255 };
export const BLACK: Color = { r: 20, g: 20, b: 20, a: 255 };

export function newFigure(): Figure {
  return { layers: [], equalAspect: true, units: "m", legend: [] };
}

export function addLayer(fig: Figure, layer: Layer): void {
  fig.layers.push(layer);
  if (layer.label && !fig.legend.includes(layer.label)) {
    fig.legend.push(layer.label);
  }
}

export function layersByRole(fig: Figure, role: LayerRole): Layer[] {
  return fig.layers.filter((l) => l.role === role);
}

/** World-coordinate bounding box over every layer point. */
export function figureBounds(fig: Figure): { min: Vec2; max: Vec2 } {
  let minX = Infinity;
  let minY = Infinity;
  let maxX = -Infinity;
  let maxY = -Infinity;
  for (const layer of fig.layers) {
    for (const [x, y] of layer.points) {
      if (x < minX) minX = x;
      if (y < minY) minY = y;
      if (x > maxX) maxX = x;
      if (y > maxY) maxY = y;
    }
  }
  if (!isFinite(minX)) {
    throw new Error("figure has no geometry");
  }
  return { min: [minX, minY], max: [maxX, maxY] };
}
