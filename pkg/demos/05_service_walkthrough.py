"""Drive the HTTP service the way the map client does.

Starts a server on an ephemeral port, loads the valley scenario over the
wire, and walks the read endpoints: health, flood polygons (with a crest
override), a route, and the lodging list. Every response body is
canonical JSON stamped with the scenario version that produced it.
"""

import json
import tempfile
import threading
import urllib.request
from pathlib import Path

from floodroute import ServiceState, make_server
from floodroute.valley import write_valley_scenario


def get(base: str, path: str) -> dict:
    with urllib.request.urlopen(f"{base}{path}") as resp:
        return json.load(resp)


def post(base: str, path: str, body: dict) -> dict:
    request = urllib.request.Request(
        f"{base}{path}",
        data=json.dumps(body).encode("utf-8"),
        headers={"Content-Type": "application/json"},
        method="POST",
    )
    with urllib.request.urlopen(request) as resp:
        return json.load(resp)


def main():
    tmp = tempfile.mkdtemp()
    manifest = write_valley_scenario(Path(tmp) / "valley")

    server = make_server("127.0.0.1", 0, ServiceState())
    threading.Thread(target=server.serve_forever, daemon=True).start()
    base = f"http://127.0.0.1:{server.server_address[1]}"
    print(f"serving on {base}")

    try:
        print(f"health before load: {get(base, '/health')}")
        loaded = post(base, "/load", {"manifest_path": str(manifest)})
        print(f"load: {loaded}")

        flood = get(base, "/flood")
        crest = get(base, "/flood?level_ft=20")
        print(f"flood polygons: {len(flood['features'])} at stage, "
              f"{len(crest['features'])} at a 20 ft crest")

        route = get(base, "/route?from=-79.195,34.625&to=-78.805,34.625")
        summary = route["route"]["features"][-1]["properties"]
        print(f"route {route['origin_node']} -> {route['destination_node']}: "
              f"{summary['total_length_m'] / 1000.0:.1f} km "
              f"(version {route['version']})")

        lodging = get(base, "/lodging?from=-79.195,34.625")
        names = [option["name"] for option in lodging["options"]]
        print(f"lodging options: {names}")
    finally:
        server.shutdown()
        server.server_close()
    print("server stopped")


if __name__ == "__main__":
    main()
