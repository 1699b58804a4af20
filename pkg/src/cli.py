#!/usr/bin/env python3
"""
Command Line for OODN-KE
Extraction runs, subsumption queries, counting, law verification, compression,
DOT export and bundled examples
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from .core.errors import OODNError
from .core.lattice import (
    KnowledgeLattice,
    LatticeMode,
    classify_object,
    close_under_exploiters,
    count_report,
    enumerate_relations,
    glb,
    lub,
    predict_counts,
    predict_types,
    verify_laws,
)
from .storage.codec import compress, restore
from .storage.dot import export_dot
from .storage.fixtures import builtin_quadrangle, synthetic_basics
from .storage.kb_document import KBDocument, load_kb, save_kb
from .storage.stats import reference_notes, storage_stats
from .utils.config import Settings, load_settings
from .utils.files import atomic_write, read_text

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_LAWS_FAILED = 3


class CommandRunner:
    """Runs one parsed subcommand and renders its report"""

    def __init__(self, args: argparse.Namespace, settings: Settings):
        self.args = args
        self.settings = settings
        self.output_format = getattr(args, "format", None) or settings.output_format

    # Input and output

    def _load(self) -> KBDocument:
        path = Path(self.args.input)
        if not path.exists():
            raise FileNotFoundError(f"Input file not found: {path}")
        return load_kb(read_text(path))

    def _lattice(self, doc: KBDocument) -> KnowledgeLattice:
        if doc.lattice is not None:
            requested = getattr(self.args, "mode", None)
            if requested and LatticeMode(requested) is not doc.lattice.mode:
                logger.warning(
                    f"Ignoring --mode {requested}: the document holds a {doc.lattice.mode.value} lattice, "
                    f"run extract again to change it"
                )
            return doc.lattice
        logger.info("Document has no lattice section, closing its classes")
        return close_under_exploiters(doc.classes, self._mode(), self._max_n())

    def _mode(self) -> LatticeMode:
        return LatticeMode(getattr(self.args, "mode", None) or self.settings.mode)

    def _max_n(self) -> int:
        return getattr(self.args, "max_n", None) or self.settings.max_n

    def _emit_text(self, text: str):
        output = getattr(self.args, "output", None)
        if output:
            atomic_write(output, text)
        else:
            sys.stdout.write(text)

    def _emit_document(self, doc: KBDocument, summary: Dict[str, Any]):
        """Document to --out with a summary on stdout, or the document itself on stdout"""
        text = save_kb(doc)
        if getattr(self.args, "output", None):
            atomic_write(self.args.output, text)
            self._report(summary)
        else:
            sys.stdout.write(text)

    def _report(self, payload: Dict[str, Any], lines: Optional[List[str]] = None):
        if self.output_format == "json":
            sys.stdout.write(json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n")
            return
        if lines is None:
            lines = [f"{key}={_plain(value)}" for key, value in payload.items()]
        for line in lines:
            print(line)

    # Subcommands

    def extract(self) -> int:
        doc = self._load()
        lattice = close_under_exploiters(doc.classes, self._mode(), self._max_n())
        doc.lattice = lattice
        report = count_report(lattice)
        summary = {
            "mode": lattice.mode.value,
            "nodes": len(lattice),
            "generated": len(lattice.keys) - len(lattice.basics),
            "distinct_unions": report.observed_union,
            "distinct_intersections": report.observed_intersection,
            "aliases": report.alias_count,
            "top": lattice.top,
            "bottom": lattice.bottom,
        }
        self._emit_document(doc, summary)
        return EXIT_OK

    def counts(self) -> int:
        if self.args.input:
            doc = self._load()
            lattice = self._lattice(doc)
            report = count_report(lattice)
            notes = reference_notes(doc.classes, {"generated_classes": len(lattice.keys) - len(lattice.basics)})
        elif self.args.n is not None:
            report = predict_counts(self.args.n)
            notes = []
        else:
            raise ValueError("counts needs --n or --in")

        payload = report.to_dict()
        lines = [
            f"union={report.predicted_union} intersection={report.predicted_intersection} "
            f"total={report.predicted_total}"
        ]
        if report.observed_total is not None:
            lines.append(
                f"observed union={report.observed_union} intersection={report.observed_intersection} "
                f"total={report.observed_total} aliases={report.alias_count}"
            )
        if self.args.types:
            payload["types"] = predict_types(report.n)
            lines.extend(
                f"k={row['k']} classes={row['classes']} union_types={row['union_types']} "
                f"intersection_types={row['intersection_types']}"
                for row in payload["types"]
            )
        if notes:
            payload["notes"] = notes
            lines.extend(f"note: {note}" for note in notes)
        self._report(payload, lines)
        return EXIT_OK

    def subsumes(self) -> int:
        lattice = self._lattice(self._load())
        result = lattice.subsumes(self.args.a, self.args.b)
        self._report({"a": lattice.resolve(self.args.a), "b": lattice.resolve(self.args.b), "subsumes": result},
                     ["true" if result else "false"])
        return EXIT_OK

    def bound(self) -> int:
        lattice = self._lattice(self._load())
        operation = lub if self.args.command == "lub" else glb
        result = operation(lattice, self.args.a, self.args.b)
        self._report({self.args.command: result}, [result])
        return EXIT_OK

    def verify(self) -> int:
        lattice = self._lattice(self._load())
        samples = self.args.samples or self.settings.samples
        seed = self.args.seed if self.args.seed is not None else self.settings.seed
        report = verify_laws(lattice, samples, seed, self.settings.pair_limit)
        lines = []
        for law in report.results:
            status = "pass" if law.passed else "FAIL " + " ".join(law.counterexample or ())
            lines.append(f"{law.name}: {status} ({law.checked} checks) {law.description}")
        lines.append(f"seed={seed} samples={samples}")
        self._report(report.to_dict(), lines)
        return EXIT_OK if report.passed else EXIT_LAWS_FAILED

    def relations(self) -> int:
        doc = self._load()
        report = enumerate_relations(self._lattice(doc))
        computed = {f"relations_{family}": count for family, count in report.families.items()}
        computed["relations_total"] = report.total_chains
        notes = reference_notes(doc.classes, computed)

        payload = report.to_dict()
        payload["notes"] = notes
        lines = [f"subsumptions={len(report.subsumptions)}", f"chains={report.total_chains}"]
        lines.extend(f"{family}={count}" for family, count in report.families.items())
        lines.extend(f"note: {note}" for note in notes)
        self._report(payload, lines)
        return EXIT_OK

    def compress(self) -> int:
        doc = self._load()
        compressed = compress(doc.classes)
        notes = reference_notes(
            doc.classes,
            {
                "compressed_properties": compressed.property_count,
                "compressed_methods": compressed.deduplicated_method_count,
            },
        )
        for note in notes:
            logger.info(note)
        summary = {
            "name": compressed.name,
            "properties": compressed.property_count,
            "methods": compressed.method_count,
            "methods_deduplicated": compressed.deduplicated_method_count,
            "shared": len(compressed.shared),
        }
        self._emit_document(KBDocument([], doc.objects, None, compressed), summary)
        return EXIT_OK

    def restore(self) -> int:
        doc = self._load()
        if doc.compressed is None:
            raise OODNError("Document has no compressed section")
        classes = restore(doc.compressed)
        self._emit_document(KBDocument(classes, doc.objects), {"classes": len(classes)})
        return EXIT_OK

    def dot(self) -> int:
        self._emit_text(export_dot(self._lattice(self._load())))
        return EXIT_OK

    def stats(self) -> int:
        doc = self._load()
        stats = storage_stats(doc)
        classes = restore(doc.compressed) if doc.compressed is not None else doc.classes
        if doc.compressed is not None:
            computed = {
                "compressed_properties": stats["properties"],
                "compressed_methods": stats["methods_deduplicated"],
            }
        else:
            computed = {"properties": stats["properties"], "methods": stats["methods"]}
        stats["notes"] = reference_notes(classes, computed)

        lines = [f"{key}={_plain(value)}" for key, value in stats.items() if key != "notes"]
        lines.extend(f"note: {note}" for note in stats["notes"])
        self._report(stats, lines)
        return EXIT_OK

    def example(self) -> int:
        if self.args.name == "quadrangle":
            doc = builtin_quadrangle()
        else:
            doc = KBDocument(synthetic_basics(self.args.n, self._max_n()))
        self._emit_text(save_kb(doc))
        return EXIT_OK

    def classify(self) -> int:
        doc = self._load()
        obj = doc.get_object(self.args.object)
        if obj is None:
            raise OODNError(f"Unknown object: {self.args.object}")
        accepted = classify_object(self._lattice(doc), obj)
        self._report({"object": obj.name, "classes": accepted}, accepted)
        return EXIT_OK


def _plain(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def build_parser() -> argparse.ArgumentParser:
    """Global options are accepted before or after the subcommand"""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["table", "json"], default=argparse.SUPPRESS,
                        help="report format (default: table)")
    common.add_argument("--verbose", "-v", action="store_true", default=argparse.SUPPRESS,
                        help="debug logging on stderr")
    common.add_argument("--config", type=Path, default=argparse.SUPPRESS,
                        help="settings file (default: ~/.config/oodn/config.json)")

    parser = argparse.ArgumentParser(prog="oodn", parents=[common],
                                     description="Knowledge extraction over object-oriented dynamic networks")
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.required = True

    def command(name: str, help_text: str, needs_input: bool = True, output: bool = False):
        sub = commands.add_parser(name, parents=[common], help=help_text)
        if needs_input:
            sub.add_argument("--in", dest="input", required=True, help="oodn-kb/1 document")
        if output:
            sub.add_argument("--out", dest="output", help="output file (default: stdout)")
        return sub

    extract = command("extract", "close basic classes under union and intersection", output=True)
    extract.add_argument("--mode", choices=[m.value for m in LatticeMode])
    extract.add_argument("--max-n", type=int, help="closure cap (env OODN_MAX_N)")

    counts = command("counts", "predicted (and observed) class counts", needs_input=False)
    counts.add_argument("--n", type=int)
    counts.add_argument("--in", dest="input", help="compare with the closure of a document")
    counts.add_argument("--types", action="store_true", help="types described per subset size")
    counts.add_argument("--mode", choices=[m.value for m in LatticeMode])

    for name, help_text in (("subsumes", "is A a subclass of B"),
                            ("lub", "least upper bound of A and B"),
                            ("glb", "greatest lower bound of A and B")):
        sub = command(name, help_text)
        sub.add_argument("a", metavar="A")
        sub.add_argument("b", metavar="B")
        sub.add_argument("--mode", choices=[m.value for m in LatticeMode])

    verify = command("verify", "check the lattice laws")
    verify.add_argument("--samples", type=int)
    verify.add_argument("--seed", type=int)
    verify.add_argument("--mode", choices=[m.value for m in LatticeMode])

    relations = command("relations", "subsumption pairs and relation families")
    relations.add_argument("--mode", choices=[m.value for m in LatticeMode])

    command("compress", "store only the top union class", output=True)
    command("restore", "rebuild basic classes from a compressed store", output=True)
    dot = command("dot", "Hasse diagram as Graphviz DOT", output=True)
    dot.add_argument("--mode", choices=[m.value for m in LatticeMode])
    command("stats", "storage statistics")

    example = command("example", "print a bundled knowledge base", needs_input=False, output=True)
    example.add_argument("name", choices=["quadrangle", "synthetic"])
    example.add_argument("--n", type=int, default=4, help="class count for synthetic")

    classify = command("classify", "classes whose types accept an object")
    classify.add_argument("object", metavar="OBJECT")
    classify.add_argument("--mode", choices=[m.value for m in LatticeMode])

    return parser


_HANDLERS = {
    "extract": CommandRunner.extract,
    "counts": CommandRunner.counts,
    "subsumes": CommandRunner.subsumes,
    "lub": CommandRunner.bound,
    "glb": CommandRunner.bound,
    "verify": CommandRunner.verify,
    "relations": CommandRunner.relations,
    "compress": CommandRunner.compress,
    "restore": CommandRunner.restore,
    "dot": CommandRunner.dot,
    "stats": CommandRunner.stats,
    "example": CommandRunner.example,
    "classify": CommandRunner.classify,
}


def run(argv: Optional[List[str]] = None) -> int:
    """Parse argv, run the subcommand and return the exit code"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK

    logging.basicConfig(
        level=logging.DEBUG if getattr(args, "verbose", False) else logging.WARNING,
        format="%(levelname)s: %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )

    try:
        settings = load_settings(getattr(args, "config", None))
        return _HANDLERS[args.command](CommandRunner(args, settings))
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as e:
        logger.error(str(e))
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except OODNError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
