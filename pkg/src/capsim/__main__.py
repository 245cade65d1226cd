try:
    from _capsim_cli.main import capsim
except ModuleNotFoundError:
    import sys

    if "--python" in sys.argv:
        print(sys.executable)
    else:
        print("Missing CLI dependencies. To use the capsim CLI run: pip install 'capsim[cli]'")
    sys.exit(1)

if __name__ == "__main__":
    capsim()
