from spokengec.cli import main

main()
