from m1mcl.cli import cli as main

if __name__ == "__main__":
    main()
