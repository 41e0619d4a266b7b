import { bootstrap } from "./app.js";

const root = document.getElementById("app");
if (root) {
  void bootstrap(root);
}
