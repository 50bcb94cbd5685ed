// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

"use strict";

const state = {
  template: null,
  meta: null,
  values: [],
  cloud: null,
  cloudId: null,
  job: null,
  dirty: false,
  version: undefined,
  provenance: "hand-edited",
  structure: null,
  yaw: 0.6,
  pitch: 0.35,
};

const $ = (id) => document.getElementById(id);
const COLORS = ["#d1495b", "#edae49", "#00798c", "#30638e", "#66a182", "#8d6a9f", "#e07a5f", "#3d405b"];

function banner(text, kind) {
  const b = $("banner");
  b.hidden = !text;
  b.textContent = text || "";
  b.className = kind || "";
}

async function api(method, path, body, raw) {
  let res;
  try {
    res = await fetch(path, {
      method,
      headers: raw ? { "Content-Type": "text/plain" } : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : raw ? body : JSON.stringify(body),
    });
  } catch (e) {
    banner("service unreachable: " + e.message);
    throw e;
  }
  const data = await res.json().catch(() => ({}));
  if (!res.ok) {
    const err = new Error(data.error || res.statusText);
    err.status = res.status;
    throw err;
  }
  return data;
}

function setDirty(d) {
  state.dirty = d;
  $("dirty").textContent = d ? "unsaved changes" : "";
  $("save").disabled = !d;
}

async function refresh() {
  const t0 = performance.now();
  state.structure = await api("POST", "/evaluate", { template: state.template, values: state.values });
  draw();
  return performance.now() - t0;
}

function buildSliders() {
  const box = $("sliders");
  box.innerHTML = "";
  for (const p of state.meta.parameters) {
    const row = document.createElement("div");
    row.className = "slider";
    const label = document.createElement("label");
    label.textContent = p.name;
    const input = document.createElement("input");
    input.type = "range";
    input.min = 0;
    input.max = 1;
    input.step = 0.001;
    input.value = state.values[p.index];
    input.dataset.index = p.index;
    const value = document.createElement("span");
    value.className = "value";
    const show = () => {
      const a = state.values[p.index];
      value.textContent = p.kind === "range" ? (p.min + (p.max - p.min) * a).toFixed(3) : a.toFixed(3);
    };
    show();
    input.show = show;
    input.addEventListener("input", () => {
      state.values[p.index] = Number(input.value);
      if (state.provenance === "optimized") state.provenance = "mixed";
      show();
      setDirty(true);
      refresh().catch((e) => banner(e.message));
    });
    row.append(label, input, value);
    box.append(row);
  }
}

function syncSliders() {
  for (const input of $("sliders").querySelectorAll("input")) {
    input.value = state.values[Number(input.dataset.index)];
    input.show();
  }
  refresh().catch((e) => banner(e.message));
}

async function selectTemplate(name) {
  state.template = name;
  state.meta = await api("GET", "/templates/" + encodeURIComponent(name));
  state.values = state.meta.defaults.slice();
  state.version = undefined;
  buildSliders();
  setDirty(false);
  await refresh();
}

function project(p) {
  const [x, y, z] = p;
  const cy = Math.cos(state.yaw), sy = Math.sin(state.yaw);
  const cp = Math.cos(state.pitch), sp = Math.sin(state.pitch);
  const x1 = cy * x + sy * z, z1 = -sy * x + cy * z;
  const y2 = cp * y - sp * z1, z2 = sp * y + cp * z1;
  const c = $("scene");
  const s = 380 / (2.5 + z2);
  return [c.width / 2 + s * x1, c.height / 2 - s * y2];
}

function corners(f) {
  const out = [];
  for (const u of [0, 1]) for (const v of [0, 1]) for (const w of [0, 1])
    out.push([0, 1, 2].map((i) => f.origin[i] + u * f.x[i] + v * f.y[i] + w * f.z[i]));
  return out;
}

const EDGES = [[0, 1], [2, 3], [4, 5], [6, 7], [0, 2], [1, 3], [4, 6], [5, 7], [0, 4], [1, 5], [2, 6], [3, 7]];

function draw() {
  const c = $("scene");
  const g = c.getContext("2d");
  g.clearRect(0, 0, c.width, c.height);
  if (state.cloud) {
    g.fillStyle = "rgba(60,60,60,0.35)";
    for (const p of state.cloud) {
      const [u, v] = project(p);
      g.fillRect(u, v, 1.5, 1.5);
    }
  }
  if (!state.structure) return;
  state.structure.cuboids.forEach((cub, i) => {
    if (!cub.alive) return;
    const pts = corners(cub.frame).map(project);
    g.strokeStyle = COLORS[i % COLORS.length];
    g.lineWidth = 1.5;
    g.beginPath();
    for (const [a, b] of EDGES) {
      g.moveTo(...pts[a]);
      g.lineTo(...pts[b]);
    }
    g.stroke();
  });
}

function drawChart(trace) {
  const c = $("chart");
  const g = c.getContext("2d");
  g.clearRect(0, 0, c.width, c.height);
  if (!trace || trace.length < 2) return;
  const logs = trace.map((l) => Math.log10(Math.max(l, 1e-12)));
  const lo = Math.min(...logs), hi = Math.max(...logs);
  g.strokeStyle = "#30638e";
  g.beginPath();
  logs.forEach((l, i) => {
    const x = (i / (logs.length - 1)) * (c.width - 10) + 5;
    const y = c.height - 5 - ((l - lo) / Math.max(hi - lo, 1e-9)) * (c.height - 10);
    i ? g.lineTo(x, y) : g.moveTo(x, y);
  });
  g.stroke();
}

async function uploadCloud(file) {
  const text = await file.text();
  const res = await api("POST", "/pointclouds", text, true);
  state.cloudId = res.id;
  state.cloud = (await api("GET", "/pointclouds/" + res.id)).points;
  $("cloud-info").textContent = res.id + " (" + res.points + " points)";
  $("fit").disabled = false;
  draw();
}

async function startFit() {
  const body = {
    template: state.template,
    target: state.cloudId,
    init: state.values,
    config: { iterations: Number($("iterations").value), rule: "adam", final_step_fraction: 0.1 },
  };
  const res = await api("POST", "/fit", body);
  state.job = res.job;
  $("fit").disabled = true;
  $("cancel").disabled = false;
  poll();
}

async function poll() {
  if (!state.job) return;
  const job = await api("GET", "/jobs/" + state.job);
  $("job-status").textContent = job.status + " " + job.iteration + "/" + job.iterations;
  drawChart(job.loss_trace);
  if (job.status === "queued" || job.status === "running") {
    setTimeout(poll, 250);
    return;
  }
  state.job = null;
  $("fit").disabled = false;
  $("cancel").disabled = true;
  if (job.status === "failed") {
    banner("fit failed: " + job.error);
    return;
  }
  state.values = job.best_values.slice();
  state.provenance = "optimized";
  syncSliders();
  setDirty(true);
}

async function save() {
  const body = { template: state.template, values: state.values, provenance: state.provenance };
  if (state.version !== undefined) body.version = state.version;
  try {
    const rec = await api("PUT", "/annotations/" + encodeURIComponent($("object").value), body);
    state.version = rec.version;
    setDirty(false);
    banner("saved version " + rec.version, "info");
  } catch (e) {
    if (e.status === 409 && e.message.startsWith("version"))
      banner("this record changed elsewhere; load it again before saving");
    else banner(e.message);
  }
}

async function load() {
  try {
    const rec = await api("GET", "/annotations/" + encodeURIComponent($("object").value));
    if (rec.template !== state.template) {
      $("template").value = rec.template;
      await selectTemplate(rec.template);
    }
    state.values = rec.values.slice();
    state.version = rec.version;
    state.provenance = rec.provenance;
    syncSliders();
    setDirty(false);
    banner("");
  } catch (e) {
    banner(e.message);
  }
}

function bindDrag() {
  const c = $("scene");
  let last = null;
  c.addEventListener("mousedown", (e) => (last = [e.clientX, e.clientY]));
  window.addEventListener("mouseup", () => (last = null));
  window.addEventListener("mousemove", (e) => {
    if (!last) return;
    state.yaw += (e.clientX - last[0]) * 0.01;
    state.pitch += (e.clientY - last[1]) * 0.01;
    last = [e.clientX, e.clientY];
    draw();
  });
}

async function main() {
  bindDrag();
  $("template").addEventListener("change", (e) => selectTemplate(e.target.value));
  $("cloud").addEventListener("change", (e) => e.target.files[0] && uploadCloud(e.target.files[0]));
  $("fit").addEventListener("click", () => startFit().catch((e) => banner(e.message)));
  $("cancel").addEventListener("click", () => state.job && api("DELETE", "/jobs/" + state.job));
  $("save").addEventListener("click", save);
  $("load").addEventListener("click", load);
  const list = await api("GET", "/templates");
  for (const t of list.templates) {
    const o = document.createElement("option");
    o.value = o.textContent = t.name;
    $("template").append(o);
  }
  if (list.templates.length) await selectTemplate(list.templates[0].name);
}

main().catch((e) => banner(e.message));
