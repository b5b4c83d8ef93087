"""Entry point for python -m mvhvi."""

from mvhvi.cli.main import main

if __name__ == "__main__":
    main()
