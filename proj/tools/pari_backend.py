#!/usr/bin/env python3
"""PARI/GP adapter for the succmax backend line protocol (needs cypari2).

    Q <id> CLASSNO_CUBIC <c2> <c1> <c0>   ->  bnfinit(x^3+c2*x^2+c1*x+c0, 1).no
    Q <id> CLASSNO_QUAD <D>               ->  qfbclassno(D) for D < 0, narrow class number for D > 0
    Q <id> SUBCYCLO <f> <p>               ->  polsubcyclo(f, p)

Replies are "A <id> OK <value>" or "A <id> ERR <message>", one line each.
"""

import sys

import cypari2

pari = cypari2.Pari()
pari.allocatemem(512 * 1024 * 1024, silent=True)


def answer(request_id, ok, text):
    status = "OK" if ok else "ERR"
    text = " ".join(str(text).split())
    sys.stdout.write(f"A {request_id} {status} {text}\n")
    sys.stdout.flush()


def evaluate(kind, args):
    values = [int(a) for a in args]
    if kind == "CLASSNO_CUBIC" and len(values) == 3:
        c2, c1, c0 = values
        return pari(f"bnfinit(x^3+({c2})*x^2+({c1})*x+({c0}),1).no")
    if kind == "CLASSNO_QUAD" and len(values) == 1:
        (d,) = values
        if not pari(f"isfundamental({d})"):
            raise ValueError(f"{d} is not fundamental")
        if d < 0:
            return pari(f"qfbclassno({d})")
        return pari(f"bnfnarrow(bnfinit(quadpoly({d})))[1]")
    if kind == "SUBCYCLO" and len(values) == 2:
        f, p = values
        return pari(f"polsubcyclo({f},{p})")
    raise ValueError(f"unsupported request {kind} {' '.join(args)}")


def main():
    for line in sys.stdin:
        parts = line.split()
        if not parts:
            continue
        if len(parts) < 3 or parts[0] != "Q":
            answer(parts[1] if len(parts) > 1 else "0", False, "malformed request")
            continue
        request_id, kind, args = parts[1], parts[2], parts[3:]
        try:
            answer(request_id, True, evaluate(kind, args))
        except Exception as exc:  # reported to the client, never fatal
            answer(request_id, False, exc)


if __name__ == "__main__":
    main()
