import { SlateApp } from "./app.js";
import { ServiceClient } from "./transport.js";

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("service") ?? "http://127.0.0.1:8765";
const session = params.get("session") ?? "default";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app mount point");

const client = new ServiceClient(baseUrl, session);
const app = new SlateApp(root, client);
void app.start();
