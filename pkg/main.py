from wallcross.app import main

raise SystemExit(main())
