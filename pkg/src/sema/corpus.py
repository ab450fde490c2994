"""Random storyboard generator for property-based and differential testing.

Generated storyboards always resolve: every reference is drawn from what is
in scope, and every target parameter is propagated exactly once.
"""

from __future__ import annotations

import random
from typing import Optional

from .dsl import syntax as ast
from .dsl.printer import pretty_print

KEY_POOL = ("MyContacts.txt", "a.txt", "b.txt")
RESOURCE_NAMES = ("EXT_STORE", "INT_STORE", "SMS", "NET")
CAPABILITIES = (
    ("read", (("f", "File"),), "Data"),
    ("write", (("f", "File"), ("d", "Data")), None),
    ("send", (("m", "Text"), ("p", "Data")), None),
    ("fetch", (), "Data"),
    ("exec", (("c", "Text"),), None),
    ("query", (("q", "Text"),), "Data"),
)


class _Gen:
    def __init__(self, rng: random.Random, max_screens: int, max_resources: int, max_transitions: int):
        self.rng = rng
        self.max_screens = max_screens
        self.max_resources = max_resources
        self.max_transitions = max_transitions
        self.caps: list[tuple[str, ast.RawCapability]] = []

    def resources(self) -> tuple[ast.RawResource, ...]:
        rng = self.rng
        out = []
        for name in rng.sample(RESOURCE_NAMES, rng.randint(0, self.max_resources)):
            caps = []
            for cname, params, ret in rng.sample(CAPABILITIES, rng.randint(1, 4)):
                annots = []
                if rng.random() < 0.45:
                    annots.append("sensitive")
                if rng.random() < 0.25:
                    annots.append("privileged")
                cap = ast.RawCapability(cname, tuple(ast.RawParam(p, t) for p, t in params), ret, tuple(annots))
                caps.append(cap)
                self.caps.append((name, cap))
            trust = rng.choices(("private", "shared", "external"), weights=(1, 1, 2))[0]
            out.append(ast.RawResource(name, trust, tuple(caps)))
        return tuple(out)

    def expr(self, scope: list[str], depth: int) -> ast.RawExpr:
        rng = self.rng
        roll = rng.random()
        if self.caps and depth > 0 and roll < 0.55:
            res, cap = rng.choice(self.caps)
            args = []
            for i in range(len(cap.params)):
                if i == 0 and rng.random() < 0.7:
                    args.append(ast.StrLit(rng.choice(KEY_POOL)))
                else:
                    args.append(self.expr(scope, depth - 1))
            return ast.RefExpr(res, cap.name, tuple(args) if args or rng.random() < 0.8 else None)
        if scope and roll < 0.75:
            return ast.RefExpr(rng.choice(scope))
        if rng.random() < 0.2:
            return ast.IntLit(rng.randint(0, 3))
        return ast.StrLit(rng.choice(KEY_POOL + ("hello", "")))

    def guard(self, buttons: list[str], scope: list[str], depth: int) -> ast.RawGuard:
        rng = self.rng
        roll = rng.random()
        if depth > 0 and roll < 0.35:
            cls = rng.choice((ast.AndGuard, ast.OrGuard))
            return cls(self.guard(buttons, scope, depth - 1), self.guard(buttons, scope, depth - 1))
        if depth > 0 and roll < 0.45:
            return ast.NotGuard(self.guard(buttons, scope, depth - 1))
        if buttons and rng.random() < 0.7:
            return ast.PressAtom(rng.choice(buttons))
        return ast.CondAtom(self.expr(scope, 2))

    def storyboard(self) -> ast.RawStoryboard:
        rng = self.rng
        resources = self.resources()
        requirements = tuple(ast.RawRequirement(a) for a in rng.sample(KEY_POOL, rng.randint(0, 2)))
        n = rng.randint(1, self.max_screens)
        names = [f"S{i}" for i in range(n)]
        heads = []
        for i, name in enumerate(names):
            flags = ["launcher"] if i == 0 else []
            if rng.random() < (0.15 if i == 0 else 0.35):
                flags.append("exported")
            n_params = rng.randint(0, 2) if "exported" in flags else rng.choice((0, 0, 1))
            params = tuple(ast.RawParam(f"p{j}", "Text") for j in range(n_params))
            heads.append((name, tuple(flags), params))

        bodies = {}
        for name, _, params in heads:
            scope = [p.name for p in params]
            widgets = []
            buttons = []
            for b in range(rng.choice((0, 1, 1, 2))):
                widgets.append(ast.RawWidget("Button", f"B{b}"))
                buttons.append(f"B{b}")
            if rng.random() < 0.7:
                widgets.append(ast.RawWidget("TextView", "V0", self.expr(scope, 2) if rng.random() < 0.8 else None))
                scope.append("V0")
            if rng.random() < 0.4:
                widgets.append(ast.RawWidget("TextInput", "I0"))
                scope.append("I0")
            bodies[name] = (widgets, buttons, scope, [])

        params_of = {name: params for name, _, params in heads}
        for _ in range(rng.randint(0, self.max_transitions)):
            src, tgt = rng.choice(names), rng.choice(names)
            _, buttons, scope, transitions = bodies[src]
            if rng.random() < 0.1 and scope:
                atom = ast.CondAtom(ast.RefExpr(rng.choice(scope)))
                guard: Optional[ast.RawGuard] = ast.AndGuard(atom, ast.NotGuard(atom))
            elif rng.random() < 0.15:
                guard = None
            else:
                guard = self.guard(buttons, scope, 2)
            props = tuple(ast.RawPropagation(self.expr(scope, 2), p.name) for p in params_of[tgt])
            transitions.append(ast.RawTransition(src, tgt, guard, props))

        screens = []
        for name, flags, params in heads:
            widgets, _, _, transitions = bodies[name]
            screens.append(ast.RawScreen(name, flags, params or None, tuple(widgets), tuple(transitions)))
        return ast.RawStoryboard("Gen", resources, requirements, tuple(screens))


def random_raw_storyboard(rng: random.Random, max_screens: int = 5, max_resources: int = 3,
                          max_transitions: int = 8) -> ast.RawStoryboard:
    return _Gen(rng, max_screens, max_resources, max_transitions).storyboard()


def random_storyboard_source(rng: random.Random, **limits: int) -> str:
    return pretty_print(random_raw_storyboard(rng, **limits))


def corpus(count: int, seed: int = 0, **limits: int) -> list[str]:
    """``count`` storyboard sources from a fixed seed."""
    rng = random.Random(seed)
    return [random_storyboard_source(rng, **limits) for _ in range(count)]
