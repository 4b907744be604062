"""Click subcommands, one module per experiment family."""
