#!/usr/bin/env python3
"""Writes data/geometry/us-states.json: coarse bounding-box polygons per US state.

The boxes are approximate extents (degrees), good enough for a schematic map layer.
"""
import json
import os

BOXES = {
    "Alabama": (-88.5, 30.2, -84.9, 35.0), "Alaska": (-168.0, 54.5, -141.0, 71.4),
    "Arizona": (-114.8, 31.3, -109.0, 37.0), "Arkansas": (-94.6, 33.0, -89.6, 36.5),
    "California": (-124.4, 32.5, -114.1, 42.0), "Colorado": (-109.1, 37.0, -102.0, 41.0),
    "Connecticut": (-73.7, 41.0, -71.8, 42.1), "Delaware": (-75.8, 38.5, -75.0, 39.8),
    "District of Columbia": (-77.1, 38.8, -76.9, 39.0), "Florida": (-87.6, 24.5, -80.0, 31.0),
    "Georgia": (-85.6, 30.4, -80.8, 35.0), "Hawaii": (-160.2, 18.9, -154.8, 22.2),
    "Idaho": (-117.2, 42.0, -111.0, 49.0), "Illinois": (-91.5, 37.0, -87.5, 42.5),
    "Indiana": (-88.1, 37.8, -84.8, 41.8), "Iowa": (-96.6, 40.4, -90.1, 43.5),
    "Kansas": (-102.1, 37.0, -94.6, 40.0), "Kentucky": (-89.6, 36.5, -81.9, 39.1),
    "Louisiana": (-94.0, 29.0, -89.0, 33.0), "Maine": (-71.1, 43.1, -66.9, 47.5),
    "Maryland": (-79.5, 37.9, -75.0, 39.7), "Massachusetts": (-73.5, 41.2, -69.9, 42.9),
    "Michigan": (-90.4, 41.7, -82.4, 48.3), "Minnesota": (-97.2, 43.5, -89.5, 49.4),
    "Mississippi": (-91.7, 30.2, -88.1, 35.0), "Missouri": (-95.8, 36.0, -89.1, 40.6),
    "Montana": (-116.1, 44.4, -104.0, 49.0), "Nebraska": (-104.1, 40.0, -95.3, 43.0),
    "Nevada": (-120.0, 35.0, -114.0, 42.0), "New Hampshire": (-72.6, 42.7, -70.6, 45.3),
    "New Jersey": (-75.6, 38.9, -73.9, 41.4), "New Mexico": (-109.1, 31.3, -103.0, 37.0),
    "New York": (-79.8, 40.5, -71.9, 45.0), "North Carolina": (-84.3, 33.8, -75.5, 36.6),
    "North Dakota": (-104.1, 45.9, -96.6, 49.0), "Ohio": (-84.8, 38.4, -80.5, 42.0),
    "Oklahoma": (-103.0, 33.6, -94.4, 37.0), "Oregon": (-124.6, 42.0, -116.5, 46.3),
    "Pennsylvania": (-80.5, 39.7, -74.7, 42.3), "Rhode Island": (-71.9, 41.1, -71.1, 42.0),
    "South Carolina": (-83.4, 32.0, -78.5, 35.2), "South Dakota": (-104.1, 42.5, -96.4, 45.9),
    "Tennessee": (-90.3, 35.0, -81.6, 36.7), "Texas": (-106.6, 25.8, -93.5, 36.5),
    "Utah": (-114.1, 37.0, -109.0, 42.0), "Vermont": (-73.4, 42.7, -71.5, 45.0),
    "Virginia": (-83.7, 36.5, -75.2, 39.5), "Washington": (-124.8, 45.5, -116.9, 49.0),
    "West Virginia": (-82.6, 37.2, -77.7, 40.6), "Wisconsin": (-92.9, 42.5, -86.8, 47.1),
    "Wyoming": (-111.1, 41.0, -104.1, 45.0),
}


def main():
    features = []
    for name in sorted(BOXES):
        w, s, e, n = BOXES[name]
        features.append({
            "type": "Feature",
            "id": name,
            "properties": {"name": name},
            "geometry": {"type": "Polygon", "coordinates": [[[w, s], [e, s], [e, n], [w, n], [w, s]]]},
        })
    out = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "data", "geometry", "us-states.json")
    with open(out, "w") as f:
        json.dump({"type": "FeatureCollection", "id": "us-states", "features": features}, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main()
