"""Drive the axiform command line end to end from a pair of JSON files.

The CLI wraps the same experiment runners used elsewhere in these demos:
a config file names a scene (inline or by path) plus parameters, and the
subcommand decides which experiment to run and which report files to
write.  Everything below goes through subprocess so the output matches
what a shell user would see, including the one-line JSON summary on
stdout and the report files in --out.
"""

import json
import os
import shutil
import subprocess
import sys

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "out", "cli")


def axiform_cmd() -> list:
    exe = shutil.which("axiform")
    if exe:
        return [exe]
    return [sys.executable, "-m", "medaxis.cli"]


def main():
    os.makedirs(OUT, exist_ok=True)

    scene_path = os.path.join(OUT, "scene.json")
    with open(scene_path, "w") as fh:
        json.dump({"sites": [[-1.0, 0.0], [1.0, 0.0]],
                   "bounding_radius": 10.0}, fh)

    config = {
        "scene": "scene.json",
        "lambda_grid": [0.7, 0.75],
        "alpha_grid": [0.5],
        "t_count": 12,
        "samples_per_level": 300,
        "seed": 5,
        "gh_variant": False,
    }
    config_path = os.path.join(OUT, "config.json")
    with open(config_path, "w") as fh:
        json.dump(config, fh, indent=2)
    print("config written to %s:" % os.path.relpath(config_path))
    print(json.dumps(config, indent=2))

    for sub in ("axis", "sweep-lambda"):
        out_dir = os.path.join(OUT, sub)
        cmd = axiform_cmd() + [sub, "--config", config_path, "--out", out_dir]
        shown = [os.path.basename(cmd[0])]
        shown += [os.path.relpath(c) if c.startswith(OUT) else c
                  for c in cmd[1:]]
        print("\n$ %s" % " ".join(shown))
        proc = subprocess.run(cmd, capture_output=True, text=True)
        sys.stdout.write(proc.stdout)
        sys.stderr.write(proc.stderr)
        print("exit code %d, files in %s:" % (proc.returncode,
                                              os.path.relpath(out_dir)))
        for name in sorted(os.listdir(out_dir)):
            size = os.path.getsize(os.path.join(out_dir, name))
            print("  %-28s %6d bytes" % (name, size))


if __name__ == "__main__":
    main()
