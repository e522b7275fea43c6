// A ready-made demo instance so the page works without any file handling.
// Regenerate with: slotplan generate (see the repository README).
import type { ProblemDoc } from './protocol.js'

export const SAMPLE_PROBLEM: ProblemDoc = {
  "activities": [
    {
      "duration": 1,
      "groups": [
        {
          "members": [
            "t03",
            "c02"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r02",
            "r03"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a000"
    },
    {
      "duration": 2,
      "groups": [
        {
          "members": [
            "t03",
            "c01"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r04",
            "r01"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a001"
    },
    {
      "duration": 1,
      "groups": [
        {
          "members": [
            "t04",
            "c03"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r01"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a002"
    },
    {
      "duration": 1,
      "groups": [
        {
          "members": [
            "t02",
            "c00"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r04",
            "r00",
            "r02"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a003"
    },
    {
      "duration": 2,
      "groups": [
        {
          "members": [
            "t01",
            "c00"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r01",
            "r00"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a004"
    },
    {
      "duration": 1,
      "groups": [
        {
          "members": [
            "t00",
            "c04"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r03",
            "r04"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a005"
    },
    {
      "duration": 3,
      "groups": [
        {
          "members": [
            "t04",
            "c03"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r03"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a006"
    },
    {
      "duration": 1,
      "groups": [
        {
          "members": [
            "t04",
            "c02"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r03"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a007"
    },
    {
      "duration": 3,
      "groups": [
        {
          "members": [
            "t02",
            "c01"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r00",
            "r01",
            "r03"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a008"
    },
    {
      "duration": 1,
      "groups": [
        {
          "members": [
            "t00",
            "c00"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r00",
            "r01"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a009"
    },
    {
      "duration": 2,
      "groups": [
        {
          "members": [
            "t04",
            "c01"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r02",
            "r01",
            "r04"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a010"
    },
    {
      "duration": 2,
      "groups": [
        {
          "members": [
            "t01",
            "c04"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r01",
            "r02",
            "r04"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a011"
    },
    {
      "duration": 3,
      "groups": [
        {
          "members": [
            "t02",
            "c00"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r00"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a012"
    },
    {
      "duration": 1,
      "groups": [
        {
          "members": [
            "t02",
            "c01"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r00"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a013"
    },
    {
      "duration": 1,
      "groups": [
        {
          "members": [
            "t03",
            "c04"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r04"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a014"
    },
    {
      "duration": 2,
      "groups": [
        {
          "members": [
            "t02",
            "c02"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r01"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a015"
    },
    {
      "duration": 3,
      "groups": [
        {
          "members": [
            "t02",
            "c02"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r02",
            "r00",
            "r04"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a016"
    },
    {
      "duration": 2,
      "groups": [
        {
          "members": [
            "t03",
            "c04"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r02"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a017"
    },
    {
      "duration": 2,
      "groups": [
        {
          "members": [
            "t03",
            "c03"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r00",
            "r04"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a018"
    },
    {
      "duration": 1,
      "groups": [
        {
          "members": [
            "t04",
            "c01"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r04",
            "r01",
            "r03"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a019"
    },
    {
      "duration": 2,
      "groups": [
        {
          "members": [
            "t04",
            "c00"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r00"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a020"
    },
    {
      "duration": 3,
      "groups": [
        {
          "members": [
            "t01",
            "c04"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r03",
            "r04"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a021"
    },
    {
      "duration": 3,
      "groups": [
        {
          "members": [
            "t00",
            "c04"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r00",
            "r04"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a022"
    },
    {
      "duration": 3,
      "groups": [
        {
          "members": [
            "t03",
            "c01"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r02"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a023"
    },
    {
      "duration": 2,
      "groups": [
        {
          "members": [
            "t03",
            "c02"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r02",
            "r00",
            "r04"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a024"
    },
    {
      "duration": 1,
      "groups": [
        {
          "members": [
            "t02",
            "c01"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r02",
            "r01"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a025"
    },
    {
      "duration": 2,
      "groups": [
        {
          "members": [
            "t01",
            "c02"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r00",
            "r03"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a026"
    },
    {
      "duration": 3,
      "groups": [
        {
          "members": [
            "t04",
            "c04"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r01",
            "r02",
            "r04"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a027"
    },
    {
      "duration": 2,
      "groups": [
        {
          "members": [
            "t00",
            "c00"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r02",
            "r00",
            "r03"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a028"
    },
    {
      "duration": 2,
      "groups": [
        {
          "members": [
            "t01",
            "c03"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r03",
            "r04"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a029"
    },
    {
      "duration": 1,
      "groups": [
        {
          "members": [
            "t01",
            "c01"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r04",
            "r02"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a030"
    },
    {
      "duration": 2,
      "groups": [
        {
          "members": [
            "t03",
            "c04"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r00",
            "r03",
            "r04"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a031"
    },
    {
      "duration": 2,
      "groups": [
        {
          "members": [
            "t03",
            "c00"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r03",
            "r00",
            "r04"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a032"
    },
    {
      "duration": 1,
      "groups": [
        {
          "members": [
            "t01",
            "c03"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r01",
            "r02"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a033"
    },
    {
      "duration": 2,
      "groups": [
        {
          "members": [
            "t02",
            "c00"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r01",
            "r04"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a034"
    },
    {
      "duration": 1,
      "groups": [
        {
          "members": [
            "t00",
            "c04"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r02",
            "r00",
            "r01"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a035"
    },
    {
      "duration": 1,
      "groups": [
        {
          "members": [
            "t02",
            "c04"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r01",
            "r00",
            "r02"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a036"
    },
    {
      "duration": 2,
      "groups": [
        {
          "members": [
            "t01",
            "c01"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r04",
            "r02",
            "r03"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a037"
    },
    {
      "duration": 2,
      "groups": [
        {
          "members": [
            "t04",
            "c03"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r02",
            "r04"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a038"
    },
    {
      "duration": 2,
      "groups": [
        {
          "members": [
            "t03",
            "c01"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r00"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a039"
    },
    {
      "duration": 3,
      "groups": [
        {
          "members": [
            "t00",
            "c00"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r04"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a040"
    },
    {
      "duration": 3,
      "groups": [
        {
          "members": [
            "t02",
            "c00"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r04",
            "r00",
            "r03"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a041"
    },
    {
      "duration": 2,
      "groups": [
        {
          "members": [
            "t04",
            "c02"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r04",
            "r01",
            "r02"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a042"
    },
    {
      "duration": 3,
      "groups": [
        {
          "members": [
            "t00",
            "c03"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r02",
            "r01",
            "r04"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a043"
    },
    {
      "duration": 1,
      "groups": [
        {
          "members": [
            "t03",
            "c00"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r00"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a044"
    },
    {
      "duration": 1,
      "groups": [
        {
          "members": [
            "t02",
            "c00"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r00"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a045"
    },
    {
      "duration": 1,
      "groups": [
        {
          "members": [
            "t01",
            "c04"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r04",
            "r02"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a046"
    },
    {
      "duration": 2,
      "groups": [
        {
          "members": [
            "t02",
            "c01"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r04"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a047"
    },
    {
      "duration": 2,
      "groups": [
        {
          "members": [
            "t01",
            "c03"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r01",
            "r00",
            "r02"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a048"
    },
    {
      "duration": 3,
      "groups": [
        {
          "members": [
            "t02",
            "c01"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r00",
            "r03",
            "r04"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a049"
    },
    {
      "duration": 2,
      "groups": [
        {
          "members": [
            "t04",
            "c01"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r04",
            "r01"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a050"
    },
    {
      "duration": 3,
      "groups": [
        {
          "members": [
            "t00",
            "c04"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r03",
            "r04"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a051"
    },
    {
      "duration": 1,
      "groups": [
        {
          "members": [
            "t04",
            "c02"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r00",
            "r04"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a052"
    },
    {
      "duration": 2,
      "groups": [
        {
          "members": [
            "t02",
            "c03"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r00",
            "r03"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a053"
    },
    {
      "duration": 2,
      "groups": [
        {
          "members": [
            "t02",
            "c04"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r01",
            "r02",
            "r03"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a054"
    },
    {
      "duration": 1,
      "groups": [
        {
          "members": [
            "t01",
            "c02"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r03",
            "r02"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a055"
    },
    {
      "duration": 3,
      "groups": [
        {
          "members": [
            "t01",
            "c03"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r03"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a056"
    },
    {
      "duration": 1,
      "groups": [
        {
          "members": [
            "t03",
            "c03"
          ],
          "mode": "conjunctive"
        },
        {
          "members": [
            "r04"
          ],
          "mode": "disjunctive"
        }
      ],
      "id": "a057"
    }
  ],
  "dependencies": [
    {
      "first": "a032",
      "kind": "before",
      "second": "a004"
    },
    {
      "first": "a010",
      "kind": "before",
      "second": "a025"
    },
    {
      "first": "a050",
      "kind": "before",
      "second": "a047"
    },
    {
      "first": "a043",
      "kind": "meets",
      "second": "a056"
    },
    {
      "first": "a057",
      "kind": "before",
      "second": "a053"
    },
    {
      "first": "a054",
      "kind": "before",
      "second": "a022"
    },
    {
      "first": "a035",
      "kind": "before",
      "second": "a005"
    }
  ],
  "format": "slotplan-problem",
  "grid": {
    "days": 5,
    "slots_per_day": 8
  },
  "resources": [
    {
      "id": "t00",
      "kind": "teacher",
      "soft": [
        8,
        32,
        39
      ]
    },
    {
      "id": "t01",
      "kind": "teacher",
      "soft": [
        1,
        20,
        32,
        36
      ]
    },
    {
      "id": "t02",
      "kind": "teacher"
    },
    {
      "id": "t03",
      "kind": "teacher"
    },
    {
      "id": "t04",
      "kind": "teacher",
      "soft": [
        2,
        25,
        35
      ]
    },
    {
      "id": "c00",
      "kind": "class",
      "soft": [
        2,
        4,
        8,
        34,
        36
      ]
    },
    {
      "id": "c01",
      "kind": "class",
      "soft": [
        15,
        17,
        30
      ]
    },
    {
      "id": "c02",
      "kind": "class",
      "soft": [
        4,
        10,
        14,
        19,
        25,
        36
      ]
    },
    {
      "id": "c03",
      "kind": "class",
      "soft": [
        18,
        21
      ]
    },
    {
      "id": "c04",
      "kind": "class",
      "soft": [
        15,
        16,
        39
      ]
    },
    {
      "id": "r00",
      "kind": "room",
      "soft": [
        4,
        8,
        14,
        27,
        30,
        39
      ]
    },
    {
      "id": "r01",
      "kind": "room",
      "soft": [
        32,
        38
      ]
    },
    {
      "id": "r02",
      "kind": "room",
      "soft": [
        25,
        33
      ]
    },
    {
      "id": "r03",
      "kind": "room",
      "soft": [
        10,
        19,
        25,
        34,
        39
      ]
    },
    {
      "id": "r04",
      "kind": "room",
      "soft": [
        1,
        11,
        36
      ]
    }
  ],
  "version": 1
}
