#!/usr/bin/env python3
"""Regenerates the frozen oracle files under crates/core/tests/data.

RDKit supplies everything that is not specific to this crate: molecular
graph features, BRICS bonds, Murcko scaffolds and randomized atom orders.
Fingerprint bits are recomputed here from RDKit's graph with an
independent FNV-1a implementation of the documented byte layouts.

    python3 tools/make_oracles.py
"""

import json
import random
import struct
from pathlib import Path

from rdkit import Chem, RDLogger
from rdkit.Chem import BRICS

RDLogger.DisableLog("rdApp.*")

OUT = Path(__file__).resolve().parent.parent / "crates" / "core" / "tests" / "data"

SEEDS = """
CCO CC(=O)O CCOC(C)=O CCOCC CCN CCCl c1ccccc1 Cc1ccccc1 CCc1ccccc1 COc1ccccc1
CC(=O)Nc1ccccc1 CNC(C)=O OC(=O)c1ccccc1 Oc1ccccc1 Nc1ccccc1 c1ccncc1 c1ccc2ccccc2c1
c1ccc(-c2ccccc2)cc1 CC(C)Cc1ccc(C(C)C(=O)O)cc1 CC(=O)Oc1ccccc1C(=O)O
CN1C=NC2=C1C(=O)N(C)C(=O)N2C CC(C)NCC(O)COc1cccc2ccccc12 O=C(O)CCc1ccccc1
c1ccc2[nH]ccc2c1 c1ccoc1 c1ccsc1 C1CCCCC1 C1CCNCC1 C1COCCN1 O=C1CCCN1
CS(=O)(=O)Nc1ccccc1 FC(F)(F)c1ccccc1 Clc1ccc(Cl)cc1 Brc1ccccc1 NC(=O)c1cccnc1
CC(C)(C)OC(=O)N1CCCC1 CCN(CC)CC OCC(O)CO C=CC(=O)OC C#CCO N#Cc1ccccc1
O=[N+]([O-])c1ccccc1 CC(=O)[O-].[Na+] c1cnc2ncccc2c1 O=C1NC(=O)c2ccccc21
COC(=O)c1ccc(O)cc1 CCCCCCCC(=O)O CC1=CC(=O)CCC1 c1ccc(Cc2ccccc2)cc1
OC1CCCCC1N CC(N)C(=O)O NCCc1ccc(O)c(O)c1 CSCCC(N)C(=O)O c1ccc2c(c1)oc1ccccc12
O=S(=O)(O)c1ccccc1 CP(=O)(O)O CC(=O)c1ccc(N)cc1 Cn1cnc2c1ncn2C
""".split()

ALLOWED = {1, 5, 6, 7, 8, 9, 11, 15, 16, 17, 35, 53}


def fnv1a(data: bytes, h: int = 0xCBF29CE484222325) -> int:
    for b in data:
        h ^= b
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h


def bond_code(b) -> int:
    if b.GetIsAromatic():
        return 4
    return {Chem.BondType.SINGLE: 1, Chem.BondType.DOUBLE: 2, Chem.BondType.TRIPLE: 3}[b.GetBondType()]


def atom_rows(m):
    return [
        [a.GetAtomicNum(), a.GetDegree(), a.GetFormalCharge(), a.GetTotalNumHs(), int(a.IsInRing()), int(a.GetIsAromatic())]
        for a in m.GetAtoms()
    ]


def ecfp_bits(m, radius, nbits):
    codes = [
        fnv1a(struct.pack("<HBBBBB", z, min(d, 255), c & 0xFF, h, r, ar))
        for z, d, c, h, r, ar in atom_rows(m)
    ]
    bits = {c % nbits for c in codes}
    for rnd in range(1, radius + 1):
        nxt = []
        for a in m.GetAtoms():
            env = sorted((bond_code(b), codes[b.GetOtherAtomIdx(a.GetIdx())]) for b in a.GetBonds())
            data = struct.pack("<IQ", rnd, codes[a.GetIdx()]) + b"".join(struct.pack("<BQ", bc, c) for bc, c in env)
            nxt.append(fnv1a(data))
        bits |= {c % nbits for c in nxt}
        codes = nxt
    return sorted(bits)


def path_bits(m, max_path, nbits):
    bits = set()

    def emit(tokens):
        seq = min(tokens, tokens[::-1])
        bits.add(fnv1a(b"".join(struct.pack("<H", t) for t in seq)) % nbits)

    def walk(at, visited, tokens):
        if len(visited) - 1 == max_path:
            return
        for b in m.GetAtomWithIdx(at).GetBonds():
            nb = b.GetOtherAtomIdx(at)
            if nb in visited:
                continue
            t = tokens + [bond_code(b), m.GetAtomWithIdx(nb).GetAtomicNum()]
            emit(t)
            walk(nb, visited | {nb}, t)

    for a in m.GetAtoms():
        walk(a.GetIdx(), {a.GetIdx()}, [a.GetAtomicNum()])
    return sorted(bits)


def scaffold_size(m):
    """Atoms and bonds of the ring systems plus linkers, found as the atoms
    that are in a ring or separate at least two ring-bearing branches.
    Exocyclic double-bonded atoms are not kept (RDKit's Murcko keeps them)."""
    ring = {a.GetIdx() for a in m.GetAtoms() if a.IsInRing()}
    if not ring:
        return 0, 0
    kept = set(ring)
    for a in m.GetAtoms():
        i = a.GetIdx()
        if i in ring:
            continue
        branches = 0
        for start in (n.GetIdx() for n in a.GetNeighbors()):
            seen, stack = {i, start}, [start]
            while stack:
                x = stack.pop()
                for y in (n.GetIdx() for n in m.GetAtomWithIdx(x).GetNeighbors()):
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
            branches += bool(seen & ring)
        if branches >= 2:
            kept.add(i)
    bonds = sum(1 for b in m.GetBonds() if b.GetBeginAtomIdx() in kept and b.GetEndAtomIdx() in kept)
    return len(kept), bonds


def acceptable(m):
    if m is None or m.GetNumAtoms() == 0 or m.GetNumAtoms() > 40:
        return False
    if any(a.GetAtomicNum() not in ALLOWED for a in m.GetAtoms()):
        return False
    ri = m.GetRingInfo()
    for ring in ri.AtomRings():
        if all(m.GetAtomWithIdx(i).GetIsAromatic() for i in ring) and not 5 <= len(ring) <= 7:
            return False
    return True


def corpus(size=200):
    seeds = []
    for s in SEEDS:
        m = Chem.MolFromSmiles(s)
        assert m is not None, s
        seeds.append(Chem.MolToSmiles(m, isomericSmiles=False))
    frags = sorted({f for s in seeds for f in BRICS.BRICSDecompose(Chem.MolFromSmiles(s))})
    rng = random.Random(7)
    rng.shuffle(frags)
    built = []
    seen = set(seeds)
    for prod in BRICS.BRICSBuild([Chem.MolFromSmiles(f) for f in frags], maxDepth=1, scrambleReagents=False):
        try:
            prod.UpdatePropertyCache(strict=False)
            Chem.SanitizeMol(prod)
        except Exception:
            continue
        smi = Chem.MolToSmiles(prod, isomericSmiles=False)
        m = Chem.MolFromSmiles(smi)
        if smi in seen or not acceptable(m):
            continue
        seen.add(smi)
        built.append(smi)
        if len(built) >= 4 * size:
            break
    rng.shuffle(built)
    out = [s for s in seeds if acceptable(Chem.MolFromSmiles(s))]
    out += built[: size - len(out)]
    return out


def oracle(smi, rng):
    m = Chem.MolFromSmiles(smi)
    brics = []
    for (a, b), (la, lb) in BRICS.FindBRICSBonds(m):
        brics.append([a, int(la), b, int(lb)])
    brics.sort()
    scaffold_atoms, scaffold_bonds = scaffold_size(m)
    variants = list(Chem.MolToRandomSmilesVect(m, 5, randomSeed=rng.randrange(1 << 31), isomericSmiles=False))
    return {
        "smiles": smi,
        "atoms": atom_rows(m),
        "bonds": [[b.GetBeginAtomIdx(), b.GetEndAtomIdx(), bond_code(b)] for b in m.GetBonds()],
        "ecfp0": ecfp_bits(m, 0, 2048),
        "ecfp2": ecfp_bits(m, 2, 2048),
        "rdkfp7": path_bits(m, 7, 2048),
        "brics": brics,
        "scaffold_atoms": scaffold_atoms,
        "scaffold_bonds": scaffold_bonds,
        "variants": variants,
    }


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    smiles = corpus()
    (OUT / "corpus.smi").write_text("".join(s + "\n" for s in smiles))
    rng = random.Random(11)
    records = [oracle(s, rng) for s in smiles]
    with open(OUT / "molecule_oracle.jsonl", "w") as fh:
        for r in records:
            fh.write(json.dumps(r, separators=(",", ":")) + "\n")
    print(f"{len(smiles)} molecules")


if __name__ == "__main__":
    main()
