#!/usr/bin/env python3
"""Regenerates the bundled desk-scale corpus under data/.

Output is deterministic (fixed seed); rerunning produces byte-identical files.

    python3 scripts/generate_corpus.py
"""
import csv
import datetime as dt
import json
import os
import random

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "data")
SOURCES = os.path.join(ROOT, "sources")

US_STATES = [
    "Alabama", "Alaska", "Arizona", "Arkansas", "California", "Colorado", "Connecticut",
    "Delaware", "Florida", "Georgia", "Hawaii", "Idaho", "Illinois", "Indiana", "Iowa", "Kansas",
    "Kentucky", "Louisiana", "Maine", "Maryland", "Massachusetts", "Michigan", "Minnesota",
    "Mississippi", "Missouri", "Montana", "Nebraska", "Nevada", "New Hampshire", "New Jersey",
    "New Mexico", "New York", "North Carolina", "North Dakota", "Ohio", "Oklahoma", "Oregon",
    "Pennsylvania", "Rhode Island", "South Carolina", "South Dakota", "Tennessee", "Texas",
    "Utah", "Vermont", "Virginia", "Washington", "West Virginia", "Wisconsin", "Wyoming",
]

STATE_CITIES = {
    "Washington": ["Seattle", "Spokane", "Tacoma"],
    "California": ["Los Angeles", "San Francisco", "San Diego", "Sacramento"],
    "Texas": ["Austin", "Houston", "Dallas", "San Antonio"],
    "New York": ["New York City", "Buffalo", "Rochester"],
    "Massachusetts": ["Boston", "Worcester", "Cambridge"],
    "Illinois": ["Chicago", "Springfield"],
    "Colorado": ["Denver", "Colorado Springs"],
    "Florida": ["Miami", "Orlando", "Tampa"],
    "Georgia": ["Atlanta", "Savannah"],
    "Arizona": ["Phoenix", "Tucson"],
    "Oregon": ["Portland", "Eugene"],
    "Tennessee": ["Nashville", "Memphis"],
}

PROVINCES = [
    "Alberta", "British Columbia", "Manitoba", "New Brunswick", "Newfoundland and Labrador",
    "Northwest Territories", "Nova Scotia", "Nunavut", "Ontario", "Prince Edward Island",
    "Quebec", "Saskatchewan", "Yukon",
]

PROVINCE_WEIGHT = {
    "Ontario": 14.0, "Quebec": 8.5, "British Columbia": 5.0, "Alberta": 4.4, "Manitoba": 1.4,
    "Saskatchewan": 1.2, "Nova Scotia": 1.0, "New Brunswick": 0.8,
    "Newfoundland and Labrador": 0.5, "Prince Edward Island": 0.16, "Northwest Territories": 0.05,
    "Yukon": 0.04, "Nunavut": 0.04,
}


def write_source(source_id, header, rows, meta):
    with open(os.path.join(SOURCES, f"{source_id}.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    with open(os.path.join(SOURCES, f"{source_id}.meta.json"), "w") as f:
        json.dump(meta, f, indent=2)
        f.write("\n")


def attr(name, data_type, role, synonyms=(), related=(), unit=None):
    a = {"name": name, "dataType": data_type, "role": role,
         "synonyms": list(synonyms), "relatedTerms": list(related)}
    if unit:
        a["unitSemantics"] = unit
    return a


def gen_sales():
    rows = [
        ("Central", 120), ("Central", 100), ("East", 125), ("East", 100),
        ("West", 135), ("West", 100), ("South", 140), ("South", 100),
    ]
    write_source("sales", ["Region", "Sales"], rows, {
        "name": "Regional Sales",
        "description": "Sample retail sales totals recorded for each sales region.",
        "attributes": [
            attr("Region", "text", "dimension"),
            attr("Sales", "numeric", "measure", unit="USD"),
        ],
    })


def gen_superstore(rng):
    categories = {
        "Furniture": (50, 900), "Office Supplies": (5, 150), "Technology": (80, 2000),
    }
    segments = ["Consumer", "Corporate", "Home Office"]
    states = ["California", "New York", "Texas", "Washington", "Pennsylvania", "Illinois",
              "Ohio", "Florida", "Michigan", "Virginia"]
    rows = []
    start = dt.date(2019, 1, 1)
    for _ in range(2000):
        d = start + dt.timedelta(days=rng.randrange(4 * 365))
        cat = rng.choice(sorted(categories))
        lo, hi = categories[cat]
        qty = rng.randint(1, 9)
        sales = round(rng.uniform(lo, hi) * qty / 3, 2)
        profit = round(sales * rng.uniform(-0.2, 0.35), 2)
        rows.append((d.isoformat(), cat, rng.choice(segments), rng.choice(states), sales, profit, qty))
    write_source("superstore", ["Order Date", "Category", "Segment", "State", "Sales", "Profit", "Quantity"], rows, {
        "name": "Superstore Orders",
        "description": "Office retail orders with product category, customer segment, state, sales and profit.",
        "attributes": [
            attr("Order Date", "temporal", "dimension"),
            attr("Category", "text", "dimension"),
            attr("Segment", "text", "dimension"),
            attr("State", "geospatial", "dimension"),
            attr("Sales", "numeric", "measure", unit="USD"),
            attr("Profit", "numeric", "measure", unit="USD"),
            attr("Quantity", "numeric", "measure"),
        ],
    })


def gen_coffee(rng):
    products = {"Espresso": 3.0, "Cappuccino": 4.25, "Latte": 4.5, "Americano": 3.25,
                "Mocha": 4.75, "Tea": 2.75}
    stores = ["Seattle", "Portland", "Boston", "Austin"]
    rows = []
    start = dt.date(2023, 1, 1)
    for _ in range(1000):
        d = start + dt.timedelta(days=rng.randrange(181))
        p = rng.choice(sorted(products))
        units = rng.randint(1, 4)
        rows.append((d.isoformat(), rng.choice(stores), p, units, round(units * products[p], 2)))
    write_source("coffee", ["Transaction Date", "Store City", "Product", "Units", "Revenue"], rows, {
        "name": "Coffee Shop Transactions",
        "description": "Point of sale transactions from a coffee chain: drinks sold per store and day.",
        "attributes": [
            attr("Transaction Date", "temporal", "dimension"),
            attr("Store City", "geospatial", "dimension"),
            attr("Product", "text", "dimension", related=["coffee", "drink"]),
            attr("Units", "numeric", "measure"),
            attr("Revenue", "numeric", "measure", unit="USD"),
        ],
    })


def gen_nba(rng):
    teams = {
        "Boston Celtics": "East", "Brooklyn Nets": "East", "New York Knicks": "East",
        "Philadelphia 76ers": "East", "Toronto Raptors": "East", "Chicago Bulls": "East",
        "Cleveland Cavaliers": "East", "Detroit Pistons": "East", "Indiana Pacers": "East",
        "Milwaukee Bucks": "East", "Atlanta Hawks": "East", "Charlotte Hornets": "East",
        "Miami Heat": "East", "Orlando Magic": "East", "Washington Wizards": "East",
        "Denver Nuggets": "West", "Minnesota Timberwolves": "West", "Oklahoma City Thunder": "West",
        "Portland Trail Blazers": "West", "Utah Jazz": "West", "Golden State Warriors": "West",
        "Los Angeles Clippers": "West", "Los Angeles Lakers": "West", "Phoenix Suns": "West",
        "Sacramento Kings": "West", "Dallas Mavericks": "West", "Houston Rockets": "West",
        "Memphis Grizzlies": "West", "New Orleans Pelicans": "West", "San Antonio Spurs": "West",
    }
    rows = []
    for season in range(2013, 2023):
        for team in sorted(teams):
            wins = rng.randint(17, 67)
            pts = round(rng.uniform(98, 118), 1)
            rows.append((season, team, teams[team], wins, 82 - wins, pts))
    write_source("nba", ["Season", "Team", "Conference", "Wins", "Losses", "Points Per Game"], rows, {
        "name": "NBA Team Seasons",
        "description": "Regular season basketball records for every NBA team: wins, losses and scoring.",
        "attributes": [
            attr("Season", "temporal", "dimension"),
            attr("Team", "text", "dimension"),
            attr("Conference", "text", "dimension"),
            attr("Wins", "numeric", "measure"),
            attr("Losses", "numeric", "measure"),
            attr("Points Per Game", "numeric", "measure", synonyms=["scoring", "points"]),
        ],
    })


def gen_covid(rng):
    rows = []
    month = dt.date(2020, 3, 1)
    i = 0
    while month <= dt.date(2022, 12, 1):
        wave = 1.0 + 0.9 * abs(((i % 10) - 5) / 5.0)
        for p in PROVINCES:
            cases = int(PROVINCE_WEIGHT[p] * 1000 * wave * rng.uniform(0.7, 1.3))
            deaths = int(cases * rng.uniform(0.005, 0.02))
            rows.append((month.strftime("%Y-%m"), p, "Canada", cases, deaths))
        i += 1
        month = (month.replace(day=28) + dt.timedelta(days=4)).replace(day=1)
    write_source("covid", ["Month", "Province", "Country", "Cases", "Deaths"], rows, {
        "name": "COVID-19 in Canada",
        "description": "Monthly covid case and death counts reported by each Canadian province.",
        "attributes": [
            attr("Month", "temporal", "dimension"),
            attr("Province", "geospatial", "dimension"),
            attr("Country", "geospatial", "dimension"),
            attr("Cases", "numeric", "measure"),
            attr("Deaths", "numeric", "measure"),
        ],
    })


def gen_movies(rng):
    genres = ["Action", "Comedy", "Drama", "Horror", "Animation", "Documentary", "Thriller", "Romance"]
    adjectives = ["Silent", "Broken", "Golden", "Hidden", "Last", "Crimson", "Frozen", "Electric",
                  "Lonely", "Wild", "Midnight", "Burning", "Distant", "Secret", "Savage"]
    nouns = ["River", "Empire", "Garden", "Horizon", "Machine", "Kingdom", "Harbor", "Signal",
             "Orchard", "Frontier", "Mirror", "Voyage", "Citadel", "Lantern", "Summit"]
    titles = set()
    rows = []
    while len(rows) < 400:
        t = f"The {rng.choice(adjectives)} {rng.choice(nouns)}"
        if t in titles:
            t = f"{t} {rng.randint(2, 4)}"
            if t in titles:
                continue
        titles.add(t)
        year = rng.randint(2000, 2020)
        d = dt.date(year, rng.randint(1, 12), rng.randint(1, 28))
        g = rng.choice(genres)
        base = {"Action": 90, "Animation": 80, "Thriller": 45, "Comedy": 35, "Drama": 25,
                "Romance": 20, "Horror": 12, "Documentary": 4}[g]
        budget = round(base * (1 + (year - 2000) * 0.03) * rng.uniform(0.5, 1.6), 1)
        gross = round(budget * rng.uniform(0.4, 4.0), 1)
        rating = round(rng.uniform(4.0, 9.0), 1)
        rows.append((t, g, d.isoformat(), budget, gross, rating))
    write_source("movies", ["Title", "Genre", "Release Date", "Budget", "Gross", "Rating"], rows, {
        "name": "Movies",
        "description": "Feature films with genre, release date, production budget and box office gross in millions of dollars.",
        "attributes": [
            attr("Title", "text", "dimension", synonyms=["movie", "film"]),
            attr("Genre", "text", "dimension"),
            attr("Release Date", "temporal", "dimension"),
            attr("Budget", "numeric", "measure", unit="USD"),
            attr("Gross", "numeric", "measure", unit="USD"),
            attr("Rating", "numeric", "measure"),
        ],
    })


def gen_crimes(rng):
    offenses = {"Theft": 1800, "Burglary": 400, "Robbery": 90, "Assault": 250, "Homicide": 5}
    rows = []
    for state in US_STATES:
        size = rng.uniform(0.3, 4.0)
        for year in range(2011, 2021):
            for off in sorted(offenses):
                rows.append((state, year, off, int(offenses[off] * size * rng.uniform(0.8, 1.2) * 10)))
    write_source("crimes", ["State", "Year", "Crime", "Incidents"], rows, {
        "name": "US Crime Reports",
        "description": "Reported crime incidents in the USA by state, year and offense.",
        "attributes": [
            attr("State", "geospatial", "dimension"),
            attr("Year", "temporal", "dimension"),
            attr("Crime", "text", "dimension", synonyms=["offense"]),
            attr("Incidents", "numeric", "measure"),
        ],
    })


def gen_housing(rng):
    home_types = ["Single Family", "Condo", "Townhouse"]
    rows = []
    for _ in range(600):
        state = rng.choice(US_STATES)
        cities = STATE_CITIES.get(state)
        city = rng.choice(cities) if cities else ""
        d = dt.date(2015, 1, 1) + dt.timedelta(days=rng.randrange(8 * 365))
        beds = rng.randint(1, 5)
        sqft = int(beds * rng.uniform(450, 750))
        level = 1.8 if state in ("California", "New York", "Massachusetts", "Washington", "Hawaii") else 1.0
        price = int(sqft * rng.uniform(120, 260) * level * (1 + (d.year - 2015) * 0.05))
        rows.append((d.isoformat(), state, city, rng.choice(home_types), beds, sqft, price))
    write_source("housing", ["Sale Date", "State", "City", "Home Type", "Bedrooms", "Square Feet", "Price"], rows, {
        "name": "Housing",
        "description": "Residential home sale prices across the USA with state, city, home type and size.",
        "defaultAggregate": "average",
        "attributes": [
            attr("Sale Date", "temporal", "dimension"),
            attr("State", "geospatial", "dimension"),
            attr("City", "geospatial", "dimension"),
            attr("Home Type", "text", "dimension", synonyms=["housing", "house", "home"]),
            attr("Bedrooms", "numeric", "measure"),
            attr("Square Feet", "numeric", "measure"),
            attr("Price", "numeric", "measure", unit="USD"),
        ],
    })


TOPICS = [
    ("elections", ["2020 Presidential Election Results", "Voter Turnout by County",
                   "Swing States in the Elections", "Election Night Polls", "Midterm Election Seats"],
     ["elections", "politics", "vote"], [2016, 2018, 2020, 2020, 2022]),
    ("stocks", ["Tech Stocks Performance", "S&P 500 Sector Returns", "Stock Market Volatility",
                "Top Traded Stocks", "Dividend Stocks Overview"], ["stocks", "finance", "markets"], None),
    ("population", ["World Population Growth", "Population by Country", "Aging Population Trends",
                    "Urban Population Shift", "World Population Density"], ["population", "demographics", "world"], None),
    ("crime", ["Crime in USA", "Violent Crime Rates by State", "Property Crime Over a Decade",
               "Burglary Hotspots", "Crime and Policing"], ["crime", "safety", "usa"], None),
    ("covid", ["COVID-19 Cases Worldwide", "Covid Vaccination Progress", "Covid Deaths by Age",
               "Pandemic Hospitalizations", "Covid Cases in Canada"], ["covid", "health", "pandemic"], [2020, 2021, 2022]),
    ("housing", ["Housing Prices in the USA", "Rent vs Buy", "Home Sales by Month",
                 "Housing Affordability Index", "Seattle House Prices"], ["housing", "real estate", "prices"], None),
    ("climate", ["Global Temperature Anomalies", "CO2 Emissions by Country", "Sea Level Rise",
                 "Renewable Energy Adoption", "Extreme Weather Events"], ["climate", "environment", "weather"], None),
    ("sports", ["NBA Team Wins", "Premier League Goals", "Olympic Medal Table",
                "Tennis Grand Slam Winners", "World Cup Scorers"], ["sports", "basketball", "soccer"], None),
    ("movies", ["Box Office Hits", "Movie Budgets Over Time", "Oscar Winning Films",
                "Streaming vs Theatrical", "Film Genres Popularity"], ["movies", "film", "entertainment"], None),
    ("coffee", ["Coffee Consumption by Country", "Coffee Shop Sales", "Espresso Prices",
                "Coffee Bean Exports", "Cafe Openings"], ["coffee", "food", "drink"], None),
    ("economy", ["Unemployment Rate", "GDP Growth by Country", "Inflation Tracker",
                 "Minimum Wage Map", "Household Income Distribution"], ["economy", "jobs", "income"], None),
    ("education", ["College Tuition Costs", "Graduation Rates", "Student Debt",
                   "School Enrollment", "Literacy Around the World"], ["education", "schools", "students"], None),
]

SUFFIXES = ["", " Dashboard", " Explorer", " at a Glance", " Breakdown", " Story", " Analysis", " Viz"]

CHART_WEIGHTS = [
    ("bar", 20), ("line", 18), ("map", 12), ("scatterplot", 9), ("treemap", 7), ("heatmap", 6),
    ("pie", 6), ("histogram", 5), ("area", 5), ("boxplot", 3), ("sankey", 3), ("bubble", 3),
    ("gantt", 1), ("waterfall", 1), ("network", 1),
]

MARKS = {
    "bar": ["bar"], "line": ["line"], "map": ["geoshape"], "scatterplot": ["circle"],
    "treemap": ["square"], "heatmap": ["square"], "pie": ["pie"], "histogram": ["bar"],
    "area": ["area"], "boxplot": ["bar", "line"], "sankey": ["line", "bar"], "bubble": ["circle"],
    "gantt": ["bar"], "waterfall": ["bar"], "network": ["circle", "line"],
}

AUTHORS = [
    "Ava Chen", "Liam Patel", "Sofia Garcia", "Noah Kim", "Mia Johnson", "Ethan Brown",
    "Isabella Rossi", "Lucas Muller", "Amara Okafor", "Hiro Tanaka", "Zoe Martin", "Omar Haddad",
    "Elena Petrova", "Mateo Silva", "Priya Nair", "Jonas Berg", "Chloe Dubois", "Kwame Mensah",
    "Lena Fischer", "Diego Torres", "Nora Lindqvist", "Arjun Mehta", "Grace Lee", "Felix Wagner",
    "Yara Costa", "Samir Khan", "Hannah Wright", "Tomas Novak", "Maya Cohen", "Ravi Iyer",
]


def gen_viz(rng):
    types = [t for t, _ in CHART_WEIGHTS]
    weights = [w for _, w in CHART_WEIGHTS]
    lines = []
    for n in range(1000):
        topic, titles, tags, years = TOPICS[n % len(TOPICS)]
        title = rng.choice(titles) + rng.choice(SUFFIXES)
        first = rng.choices(types, weights)[0]
        charts = [first]
        if rng.random() < 0.25:
            second = rng.choices(types, weights)[0]
            if second != first:
                charts.append(second)
        marks = sorted({m for c in charts for m in MARKS[c]})
        year = rng.choice(years) if years else rng.randint(2015, 2023)
        created = dt.date(year, rng.randint(1, 12), rng.randint(1, 28))
        author = rng.choice(AUTHORS)
        label = {"scatterplot": "scatter plot", "map": "map", "treemap": "treemap"}.get(first, first + " chart")
        doc = {
            "id": f"viz-{n:04d}",
            "title": title,
            "caption": f"A {label} about {topic}.",
            "tags": tags + [first],
            "description": f"{title}: an interactive {label} exploring {topic} data.",
            "authorName": author,
            "createdDate": created.isoformat(),
            "chartTypes": charts,
            "markTypes": marks,
            "sourceUrl": f"https://public.example.org/views/viz-{n:04d}",
            "thumbnailRef": f"thumbnails/viz-{n:04d}.png",
        }
        lines.append(json.dumps(doc, separators=(",", ":")))
    with open(os.path.join(ROOT, "viz_corpus.jsonl"), "w") as f:
        f.write("\n".join(lines) + "\n")


def main():
    os.makedirs(SOURCES, exist_ok=True)
    gen_sales()
    gen_superstore(random.Random(11))
    gen_coffee(random.Random(12))
    gen_nba(random.Random(13))
    gen_covid(random.Random(14))
    gen_movies(random.Random(15))
    gen_crimes(random.Random(16))
    gen_housing(random.Random(17))
    gen_viz(random.Random(18))


if __name__ == "__main__":
    main()
