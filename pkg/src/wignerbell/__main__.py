from wignerbell.cli import main

raise SystemExit(main())
