from agi_growth.cli import main

main()
