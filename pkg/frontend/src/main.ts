// Browser entry point: read ?base=...&session=... or show the connect form.

import { mount } from "./app.js";

const root = document.getElementById("app");
if (root) {
  const app = mount(root);
  const params = new URLSearchParams(window.location.search);
  const base = params.get("base") ?? "";
  const session = params.get("session") ?? "";
  if (base && session) {
    void app.loadSession(base, session);
  } else {
    const form = document.getElementById("connect") as HTMLFormElement | null;
    form?.addEventListener("submit", (ev) => {
      ev.preventDefault();
      const data = new FormData(form);
      void app.loadSession(String(data.get("base")), String(data.get("session")));
    });
    form?.classList.remove("hidden");
  }
}
