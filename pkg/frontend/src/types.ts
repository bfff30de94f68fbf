/** Wire types, mirroring the coordination service's JSON exactly. */

export interface NodeJson {
  id: string;
  x: number;
  y: number;
}

export interface LinkJson {
  id: string;
  from: string;
  to: string;
  length: number;
  free_speed: number;
  lanes: number;
  flow_capacity: number;
}

export interface NetworkJson {
  nodes: NodeJson[];
  links: LinkJson[];
}

export interface ExitJson {
  id: string;
  link_id: string;
  offset: number;
  x: number;
  y: number;
}

export interface VolunteerJson {
  id: string;
  x: number;
  y: number;
  seats: number;
  last_update?: number | null;
}

export interface SeekerJson {
  id: string;
  x: number;
  y: number;
  party_size: number;
  last_update?: number | null;
}

export interface RouteJson {
  volunteer_id: string;
  exit_id: string | null;
  nodes: string[];
  links: string[];
  terminal_link: string | null;
  terminal_offset: number;
  polyline: [number, number][] | null;
  travel_time: number;
}

export interface PlanJson {
  routes: RouteJson[];
  unreachable: string[];
}

export interface StopJson {
  seeker_id: string;
  x: number;
  y: number;
  s: number;
}

export interface PickupsJson {
  assignments: Record<string, string>;
  stops: Record<string, StopJson[]>;
  unserved: string[];
}

export interface SnapshotJson {
  session: string;
  event_seq: number;
  network: NetworkJson;
  zone: [number, number][] | null;
  exits: ExitJson[];
  volunteers: VolunteerJson[];
  seekers: SeekerJson[];
  plan_version: number;
  plan: PlanJson | null;
  pickups: PickupsJson | null;
  max_pickup_distance: number;
}

export interface PlanPublishedPayload {
  version: number;
  plan: PlanJson;
  pickups: PickupsJson;
}

export interface RegisterPayload {
  role: "volunteer" | "seeker";
  client: VolunteerJson | SeekerJson;
}

export interface LocationPayload {
  id: string;
  x: number;
  y: number;
  role: "volunteer" | "seeker";
}

export type ClientUpdatedPayload = RegisterPayload | LocationPayload;

export interface ZoneSetPayload {
  zone: [number, number][];
  exits: ExitJson[];
}

export interface ReplanResponse {
  version: number;
  assigned: number;
  unserved: number;
}
