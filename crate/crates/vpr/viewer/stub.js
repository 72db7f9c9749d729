(function () {
  "use strict";
  var data = document.getElementById("vpr-data");
  try {
    var doc = JSON.parse(data.textContent);
    document.body.setAttribute("data-vpr-steps", String(doc.steps.length));
  } catch (err) {
    var banner = document.createElement("div");
    banner.className = "vpr-error";
    banner.setAttribute("role", "alert");
    banner.textContent = "This document is damaged and cannot be shown interactively.";
    document.body.insertBefore(banner, document.body.firstChild);
    return;
  }
  document.addEventListener("click", function (ev) {
    var shot = ev.target.closest && ev.target.closest(".vpr-shot");
    if (shot) shot.classList.toggle("vpr-zoomed");
  });
})();
