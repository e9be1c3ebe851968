#!/usr/bin/env python3
"""Loopback evaluator: echoes parameters back as objectives.

Objective k is the k-th parameter in sorted-name order. Options:
  --nan-on ID     reply with NaN for request ID
  --sleep-on ID   never reply to request ID (simulates a hang)
  --error-on ID   reply with an error message for request ID
  --exit-on ID    exit without replying to request ID
"""
import json
import sys
import time


def ids(flag):
    out = set()
    for i, a in enumerate(sys.argv):
        if a == flag:
            out.add(int(sys.argv[i + 1]))
    return out


nan_on, sleep_on, error_on, exit_on = (ids(f) for f in ("--nan-on", "--sleep-on", "--error-on", "--exit-on"))
names = [a.split("=", 1)[1] for a in sys.argv if a.startswith("--objectives=")]
names = names[0].split(",") if names else None

for line in sys.stdin:
    req = json.loads(line)
    rid = req["id"]
    params = req["params"]
    keys = sorted(params)
    objs = names or ["f%d" % (k + 1) for k in range(len(keys))]
    if rid in sleep_on:
        time.sleep(3600)
    if rid in exit_on:
        sys.exit(3)
    if rid in error_on:
        reply = {"id": rid, "error": "simulated failure"}
    elif rid in nan_on:
        reply = {"id": rid, "objectives": {o: float("nan") for o in objs}}
    else:
        reply = {"id": rid, "objectives": {o: params[k] for o, k in zip(objs, keys)}}
    sys.stdout.write(json.dumps(reply) + "\n")
    sys.stdout.flush()
