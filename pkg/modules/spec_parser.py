from typing import List, NamedTuple, Optional, Union

import lark

from modules.options import ConfigError

# a topology source like "ws:50,4,0.3" reads as a 50-node Watts-Strogatz ring where every node
# links to its 4 nearest neighbors before rewiring with probability 0.3;
# "file:data/lightning.txt" reads channels from a topology file


topology_parser = lark.Lark(r"""
start: ws | file
ws: "ws" ":" INT "," INT ("," NUMBER)?
file: "file" ":" PATH
PATH: /\S.*/
%import common.INT
%import common.NUMBER
""", parser='lalr')


values_parser = lark.Lark(r"""
start: value ("," value)*
?value: SIGNED_NUMBER -> number
      | CNAME         -> name
%import common.SIGNED_NUMBER
%import common.CNAME
%import common.WS
%ignore WS
""", parser='lalr')


class TopologySource(NamedTuple):
    kind: str                   # 'ws' or 'file'
    n: int = 0
    ring_degree: int = 0
    beta: float = 0.3
    path: Optional[str] = None


class _TopologyTransformer(lark.Transformer):
    def start(self, args):
        return args[0]
    def ws(self, args):
        n, deg = int(args[0]), int(args[1])
        beta = float(args[2]) if len(args) > 2 else 0.3
        return TopologySource('ws', n, deg, beta)
    def file(self, args):
        return TopologySource('file', path=str(args[0]).rstrip())


def _number(tok: str) -> Union[int, float]:
    try:
        return int(tok)
    except ValueError:
        return float(tok)


class _ValuesTransformer(lark.Transformer):
    def start(self, args):
        return list(args)
    def number(self, args):
        return _number(str(args[0]))
    def name(self, args):
        return str(args[0])


def parse_topology(text: str) -> TopologySource:
    """
    >>> parse_topology("ws:50,4,0.3")
    TopologySource(kind='ws', n=50, ring_degree=4, beta=0.3, path=None)
    >>> parse_topology("ws:20,2").beta
    0.3
    >>> parse_topology("file:data/lightning.txt").path
    'data/lightning.txt'
    """
    try:
        return _TopologyTransformer().transform(topology_parser.parse(text.strip()))
    except lark.exceptions.LarkError as e:
        raise ConfigError(f'bad topology source {text!r}, expected ws:n,deg[,beta] or file:PATH') from e


def parse_values(text: str) -> List[Union[int, float, str]]:
    """
    >>> parse_values("1,10,30,60")
    [1, 10, 30, 60]
    >>> parse_values("0, 0.5, 0.9,1.0")
    [0, 0.5, 0.9, 1.0]
    >>> parse_values("flash,sp")
    ['flash', 'sp']
    """
    try:
        return _ValuesTransformer().transform(values_parser.parse(text))
    except lark.exceptions.LarkError as e:
        raise ConfigError(f'bad value list {text!r}') from e
