import os
import sys

BASE_PATH      = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
CONFIG_PATH    = os.path.join(BASE_PATH, 'configs')
RESOURCE_PATH  = os.path.join(BASE_PATH, 'resources')
OUTPUT_PATH    = os.path.join(BASE_PATH, 'outputs')

DEFAULT_CONFIG_FILE = os.path.join(CONFIG_PATH, 'default.yaml')
SAMPLE_TOPOLOGY     = os.path.join(RESOURCE_PATH, 'sample_topology.txt')
SAMPLE_TRACE        = os.path.join(RESOURCE_PATH, 'sample_trace.csv')


# prepend base path to PATH
if BASE_PATH not in sys.path:
  sys.path.insert(0, BASE_PATH)
