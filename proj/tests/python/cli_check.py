"""End-to-end check of pathtrace-server and pathtrace-inspect.

usage: cli_check.py <server-binary> <inspect-binary> <demo-dir>
"""
import json
import os
import socket
import subprocess
import sys
import tempfile
import time
import urllib.request

failures = []


def check(cond, what):
    if not cond:
        failures.append(what)
        print("FAIL", what)


def free_port():
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def start_server(binary, config, *extra, env=None):
    port = free_port()
    proc = subprocess.Popen([binary, "--config", config, "--bind", f"127.0.0.1:{port}", *extra],
                            stdout=subprocess.DEVNULL, stderr=subprocess.PIPE, env=env)
    base = f"http://127.0.0.1:{port}"
    for _ in range(100):
        try:
            urllib.request.urlopen(base + "/healthz", timeout=1).read()
            return proc, base
        except OSError:
            time.sleep(0.05)
    proc.kill()
    raise SystemExit("server did not come up: " + proc.stderr.read().decode())


def inspect(binary, *args):
    r = subprocess.run([binary, *args], capture_output=True, text=True, timeout=30)
    return r.returncode, r.stdout, r.stderr


def main():
    server, inspector, demo = sys.argv[1:4]
    config = os.path.join(demo, "app.json")

    proc, base = start_server(server, config)
    try:
        form = base + "/pages/form"
        code, out, _ = inspect(inspector, form, "--id", "name")
        check(code == 0 and out == "pages/form.xhtml:3\n", f"--id name: {code} {out!r}")

        code, out, _ = inspect(inspector, form, "--tag", "ui:inputText", "--format", "json")
        reports = [json.loads(line) for line in out.splitlines()]
        check(code == 0 and [r["component_id"] for r in reports] == ["name", "age"], f"--tag json: {code} {out!r}")
        check(all(r["schema"] == "prov/1" for r in reports), "report schema")

        code, out, _ = inspect(inspector, form, "--list")
        check(code == 0 and out.splitlines()[0] == "name\tui:inputText\tpages/form.xhtml:3", f"--list: {out!r}")

        code, out, _ = inspect(inspector, form, "--id", "submit", "--show")
        check(code == 0 and "Server Path" in out and "demo.taglib.CommandButtonTag.createComponent" in out,
              f"--show: {out!r}")

        code, _, err = inspect(inspector, form + "?__prov=off", "--id", "name")
        check(code == 2 and "NoProvenance" in err, f"__prov=off: {code} {err!r}")
        code, _, _ = inspect(inspector, form, "--id", "ghost")
        check(code == 2, f"missing id: {code}")
        code, _, _ = inspect(inspector, form)
        check(code == 1, f"no selector: {code}")
        code, _, _ = inspect(inspector, form, "--format", "yaml", "--list")
        check(code == 1, f"bad format: {code}")
        code, _, _ = inspect(inspector, form, "--id", "a", "--tag", "ui:x")
        check(code == 1, f"--id with --tag: {code}")

        html = urllib.request.urlopen(form).read().decode()
        marker = html.index('data-for="age"')
        start = html.index('value="', marker) + 7
        broken = html[:start] + html[start + 12:]
        with tempfile.NamedTemporaryFile("w", suffix=".html", delete=False) as f:
            f.write(broken)
        try:
            code, _, err = inspect(inspector, f.name, "--id", "age")
            check(code == 3 and "decode error" in err, f"corrupt marker: {code} {err!r}")
            code, out, _ = inspect(inspector, f.name, "--id", "name")
            check(code == 3 and out == "pages/form.xhtml:3\n", f"intact neighbour on corrupt page: {code} {out!r}")
        finally:
            os.unlink(f.name)
    finally:
        proc.terminate()
        proc.wait(timeout=10)

    proc, base = start_server(server, config, "--no-prov")
    try:
        code, _, _ = inspect(inspector, base + "/pages/form?__prov=on", "--list")
        check(code == 2, f"--no-prov server: {code}")
    finally:
        proc.terminate()
        proc.wait(timeout=10)

    env = dict(os.environ, PATHTRACE_PROFILE="prod")
    proc, base = start_server(server, config, env=env)
    try:
        code, _, _ = inspect(inspector, base + "/pages/form", "--list")
        check(code == 2, f"prod profile: {code}")
        try:
            urllib.request.urlopen(urllib.request.Request(base + "/__prov/reload", data=b"", method="POST"))
            check(False, "prod reload accepted")
        except urllib.error.HTTPError as e:
            check(e.code == 403, f"prod reload: {e.code}")
    finally:
        proc.terminate()
        proc.wait(timeout=10)

    if failures:
        print(f"{len(failures)} CLI check(s) failed")
        return 1
    print("CLI checks passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
