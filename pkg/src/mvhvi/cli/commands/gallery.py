"""Gallery commands: list and export the built-in instances."""

from __future__ import annotations

import argparse

from mvhvi.cli.formatters import print_success, print_table, rows_table


def cmd_gallery_list(args: argparse.Namespace) -> int:
    """List the built-in instances."""
    from mvhvi.cli.gallery import ExampleGallery

    gallery = ExampleGallery()
    rows = []
    for name in gallery.names():
        inst = gallery.get(name)
        rows.append((name, inst.n, inst.m, inst.k, inst.Lambda.variant.value, inst.h.form.value))
    print_table(rows_table("Gallery", ("name", "n_V", "m_E", "k_X", "Lambda", "h"), rows))
    return 0


def cmd_gallery_export(args: argparse.Namespace) -> int:
    """Write a gallery instance as an instance file."""
    from mvhvi.cli.gallery import ExampleGallery
    from mvhvi.core.loader import dump_instance

    path = dump_instance(ExampleGallery().get(args.name), args.path)
    print_success(f"Exported {args.name} to {path}")
    return 0


def register_commands(subparsers: argparse._SubParsersAction) -> None:
    """Register gallery commands."""
    gallery_parser = subparsers.add_parser(
        "gallery",
        help="Built-in example instances",
    )
    gallery_sub = gallery_parser.add_subparsers(
        dest="gallery_command",
        metavar="<subcommand>",
    )
    gallery_parser.set_defaults(func=cmd_gallery_list)

    list_parser = gallery_sub.add_parser("list", help="List built-in instances")
    list_parser.set_defaults(func=cmd_gallery_list)

    export_parser = gallery_sub.add_parser("export", help="Write an instance file")
    export_parser.add_argument("name", help="Gallery name, e.g. contact-rod-10")
    export_parser.add_argument("path", help="Destination JSON file")
    export_parser.set_defaults(func=cmd_gallery_export)
