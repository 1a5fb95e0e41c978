import { createApp } from "./app.js";
import { configFromQuery } from "./config.js";

const root = document.getElementById("app");
if (root === null) {
  throw new Error("missing #app container");
}
createApp(root, configFromQuery(window.location.search));
