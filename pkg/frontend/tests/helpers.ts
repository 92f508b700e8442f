import { readFileSync } from "node:fs";
import { join } from "node:path";

export const FRONTEND_ROOT = join(__dirname, "..");

export function appMarkup(): string {
  const html = readFileSync(join(FRONTEND_ROOT, "index.html"), "utf-8");
  const match = html.match(/<div id="app">([\s\S]*)<\/div>\s*<script/);
  if (!match) throw new Error("index.html lost its #app container");
  return match[1];
}

export function mountApp(): HTMLElement {
  document.body.innerHTML = `<div id="app">${appMarkup()}</div>`;
  return document.getElementById("app") as HTMLElement;
}

export function readJson(path: string): any {
  return JSON.parse(readFileSync(path, "utf-8"));
}
